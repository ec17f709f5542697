//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point type the operators, spectra and filters are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances that depend on the precision are
/// exposed as associated constants so that callers do not hard-code `f64` values.
pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    /// Relative threshold under which a singular value is treated as zero.
    const RANK_TOLERANCE: f64;

    /// Absolute slack used when probing a matrix for positive semi-definiteness.
    const PSD_TOLERANCE: f64;

    /// Converts an `f64` literal. Every `f64` is representable (possibly rounded)
    /// in the supported types, so this never fails.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {
    const RANK_TOLERANCE: f64 = 1e-10;
    const PSD_TOLERANCE: f64 = 1e-10;
}

impl Scalar for f32 {
    const RANK_TOLERANCE: f64 = 1e-5;
    const PSD_TOLERANCE: f64 = 1e-4;
}
