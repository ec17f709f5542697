//! IIR filters `H = (I + gamma Q)^{-1}` with `Q` a polynomial in `D1` and `D2`.
//!
//! `H s` is the minimizer of `||x - s||^2 + gamma x^T Q x`, so applying the filter is a
//! Tikhonov-regularized least-squares solve with an SPD system matrix.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};
use nalgebra_sparse::CscMatrix;

use crate::error::{Error, Result};
use crate::operators::{DiracOperator, NormalizationMode, SimplicialSignal};
use crate::scalar::Scalar;
use crate::spectral::{Family, Variant};

/// The matrix `Q` of the regularizer.
#[derive(Clone, Debug, PartialEq)]
pub enum Regularizer<T> {
    /// `Q_n(z) = D_n^2 - z D_n^3`.
    Dirac { variant: Variant, z: T },
    /// `Q = sum_j a_j D1^j + b_j D2^j`; index 0 of each list is the coefficient of `j = 1`.
    Polynomial { a: Vec<T>, b: Vec<T> },
}

impl<T: Scalar> Regularizer<T> {
    pub fn dirac(variant: Variant, z: T) -> Result<Self> {
        let r = Regularizer::Dirac { variant, z };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Regularizer::Dirac { z, .. } => {
                if !(z.abs() < T::one()) {
                    return Err(Error::InvalidParameter(format!("|z| must be < 1, got {}", z.as_f64())));
                }
            }
            Regularizer::Polynomial { a, b } => {
                if a.iter().chain(b).any(|c| !c.is_finite()) {
                    return Err(Error::InvalidParameter("polynomial coefficients must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Eigenvalue of `Q` on an eigenvector of `D` with eigenvalue `lambda` in `family`.
    pub fn symbol(&self, family: Family, lambda: T) -> T {
        match (self, family) {
            (_, Family::Harmonic) => T::zero(),
            (Regularizer::Dirac { variant, z }, f) if f == Family::from(*variant) => {
                lambda * lambda - *z * lambda * lambda * lambda
            }
            (Regularizer::Dirac { .. }, _) => T::zero(),
            (Regularizer::Polynomial { a, .. }, Family::D1) => horner_without_constant(a, lambda),
            (Regularizer::Polynomial { b, .. }, Family::D2) => horner_without_constant(b, lambda),
        }
    }
}

fn horner_without_constant<T: Scalar>(coeffs: &[T], x: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, c| (acc + *c) * x)
}

/// Filter parameters: the regularizer and the strength `gamma >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterSpec<T> {
    pub regularizer: Regularizer<T>,
    pub gamma: T,
}

impl<T: Scalar> FilterSpec<T> {
    /// `H = (I + gamma (D_n^2 - z D_n^3))^{-1}`.
    pub fn new(variant: Variant, z: T, gamma: T) -> Result<Self> {
        let spec = Self { regularizer: Regularizer::Dirac { variant, z }, gamma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= T::zero()) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and >= 0, got {}",
                self.gamma.as_f64()
            )));
        }
        self.regularizer.validate()
    }

    /// Scalar gain of the filter on an eigenvector of `D` in `family` with eigenvalue `lambda`.
    pub fn response(&self, family: Family, lambda: T) -> T {
        T::one() / (T::one() + self.gamma * self.regularizer.symbol(family, lambda))
    }
}

/// `1 / (1 + gamma (lambda^2 - z lambda^3))`.
///
/// For `z > 0` negative eigenvalues are damped more than positive ones of the same
/// magnitude (aligned filter); `z < 0` does the opposite (anti-aligned filter).
pub fn frequency_response<T: Scalar>(z: T, gamma: T, lambda: T) -> T {
    T::one() / (T::one() + gamma * (lambda * lambda - z * lambda * lambda * lambda))
}

/// Dense symmetric `Q` for `op`.
///
/// Matrices that are not PSD by construction (general polynomials, or the `Q_n(z)`
/// form on an unnormalized operator) are probed with a dense eigensolve and rejected
/// when the smallest eigenvalue is below `-T::PSD_TOLERANCE` (relative to `max|Q|`).
pub fn build_regularizer<T: Scalar>(op: &DiracOperator<T>, regularizer: &Regularizer<T>) -> Result<DMatrix<T>> {
    regularizer.validate()?;
    let (q, needs_probe) = match regularizer {
        Regularizer::Dirac { variant, z } => {
            let d = match variant {
                Variant::D1 => op.d1(),
                Variant::D2 => op.d2(),
            };
            let d2 = &d * &d;
            let d3 = &d2 * &d;
            let q = DMatrix::from(&d2) - DMatrix::from(&d3) * *z;
            (q, op.normalization().mode == NormalizationMode::None)
        }
        Regularizer::Polynomial { a, b } => {
            let mut q = DMatrix::zeros(op.size(), op.size());
            add_polynomial(&mut q, &op.d1(), a);
            add_polynomial(&mut q, &op.d2(), b);
            (q, true)
        }
    };
    if needs_probe {
        let min = min_eigenvalue(&q)?;
        let scale = q.amax().max(T::one());
        if min < -T::lit(T::PSD_TOLERANCE) * scale {
            return Err(Error::IndefiniteRegularizer(min.as_f64()));
        }
    }
    Ok(q)
}

fn add_polynomial<T: Scalar>(q: &mut DMatrix<T>, d: &CscMatrix<T>, coeffs: &[T]) {
    let mut power = d.clone();
    for (j, c) in coeffs.iter().enumerate() {
        if j > 0 {
            power = &power * d;
        }
        if *c != T::zero() {
            *q += DMatrix::from(&power) * *c;
        }
    }
}

pub(crate) fn min_eigenvalue<T: Scalar>(m: &DMatrix<T>) -> Result<T> {
    if m.is_empty() {
        return Ok(T::zero());
    }
    let eig = SymmetricEigen::try_new(m.clone(), T::default_epsilon(), 0).ok_or(Error::EigenFailure)?;
    Ok(eig.eigenvalues.iter().copied().fold(T::max_value().unwrap(), |a, b| a.min(b)))
}

#[derive(Clone, Debug)]
pub struct FilterResult<T: Scalar> {
    pub s_hat: SimplicialSignal<T>,
    /// `||(I + gamma Q) s_hat - s_tilde||_2`
    pub solve_residual: T,
}

/// A factorized filter, reusable across many input signals.
#[derive(Clone, Debug)]
pub struct Filter<T: Scalar> {
    system: DMatrix<T>,
    factor: Cholesky<T, Dyn>,
}

impl<T: Scalar> Filter<T> {
    pub fn new(op: &DiracOperator<T>, spec: &FilterSpec<T>) -> Result<Self> {
        spec.validate()?;
        let q = build_regularizer(op, &spec.regularizer)?;
        Self::from_regularizer(&q, spec.gamma)
    }

    /// Factorizes `I + gamma Q` for an already assembled `Q`.
    pub fn from_regularizer(q: &DMatrix<T>, gamma: T) -> Result<Self> {
        let n = q.nrows();
        let system = DMatrix::identity(n, n) + q * gamma;
        let factor = Cholesky::new(system.clone()).ok_or(Error::SolverBreakdown)?;
        Ok(Self { system, factor })
    }

    pub fn apply(&self, s_tilde: &SimplicialSignal<T>) -> Result<FilterResult<T>> {
        if s_tilde.len() != self.system.nrows() {
            return Err(Error::DimensionMismatch {
                what: "signal length",
                expected: self.system.nrows(),
                actual: s_tilde.len(),
            });
        }
        let x = self.factor.solve(s_tilde.as_vector());
        let solve_residual = (&self.system * &x - s_tilde.as_vector()).norm();
        Ok(FilterResult { s_hat: s_tilde.with_data(x), solve_residual })
    }

    /// Filters every column of `signals`.
    pub fn apply_columns(&self, signals: &DMatrix<T>) -> DMatrix<T> {
        self.factor.solve(signals)
    }

    /// `I + gamma Q`.
    pub fn system_matrix(&self) -> &DMatrix<T> {
        &self.system
    }
}

/// One-shot `H_gamma s_tilde`.
pub fn apply_filter<T: Scalar>(
    op: &DiracOperator<T>,
    spec: &FilterSpec<T>,
    s_tilde: &SimplicialSignal<T>,
) -> Result<FilterResult<T>> {
    s_tilde.check_dims(op.dims())?;
    Filter::new(op, spec)?.apply(s_tilde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{ngf_generate, NgfConfig, SimplicialComplex2};

    fn op(t: usize) -> DiracOperator<f64> {
        let c = ngf_generate(&NgfConfig::new(t, 3)).unwrap();
        DiracOperator::unweighted(&c, NormalizationMode::Spectral).unwrap()
    }

    #[test]
    fn uncoupled_regularizer_is_block_laplacian() {
        let op = op(6);
        let q = build_regularizer(&op, &Regularizer::dirac(Variant::D1, 0.0).unwrap()).unwrap();
        let lap = op.laplacians();
        let (n, e) = (op.dims().nodes, op.dims().edges);
        assert!((q.view((0, 0), (n, n)) - DMatrix::from(&lap.l0)).amax() < 1e-14);
        let b1 = DMatrix::from(op.b1());
        assert!((q.view((n, n), (e, e)) - b1.transpose() * &b1).amax() < 1e-14);
        assert_eq!(q.rows(n + e, op.dims().triangles).amax(), 0.0);
        assert!((q.view((0, n), (n, e))).amax() < 1e-14);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(FilterSpec::new(Variant::D1, 1.0, 1.0).is_err());
        assert!(FilterSpec::new(Variant::D1, -1.2, 1.0).is_err());
        assert!(FilterSpec::new(Variant::D1, 0.5, -1.0).is_err());
        assert!(FilterSpec::new(Variant::D1, 0.5, f64::NAN).is_err());
    }

    #[test]
    fn identity_at_zero_gamma() {
        let op = op(8);
        let s = SimplicialSignal::from_vector(
            op.dims(),
            nalgebra::DVector::from_fn(op.size(), |i, _| (i as f64 * 0.37).sin()),
        )
        .unwrap();
        let out = apply_filter(&op, &FilterSpec::new(Variant::D2, 0.95, 0.0).unwrap(), &s).unwrap();
        assert_eq!(out.s_hat, s);
    }

    #[test]
    fn aligned_and_anti_aligned_responses() {
        let (g, z) = (2.82f64, -0.95f64);
        assert!(frequency_response(z, g, -1.0) > frequency_response(z, g, 1.0));
        assert!(frequency_response(-z, g, -1.0) < frequency_response(-z, g, 1.0));
        assert_eq!(frequency_response(0.3, 5.0, 0.0), 1.0);
        assert_eq!(frequency_response(0.0, 5.0, 0.4), frequency_response(0.0, 5.0, -0.4));
        // hand-evaluated: 1/(1 + 2.82 * (1 - 0.95)) and 1/(1 + 2.82 * 1.95)
        assert!((frequency_response(z, g, -1.0) - 1.0 / 1.141).abs() < 1e-12);
        assert!((frequency_response(z, g, 1.0) - 1.0 / 6.499).abs() < 1e-12);
    }

    #[test]
    fn polynomial_matches_dirac_form() {
        let op = op(10);
        let z = 0.4;
        let q1 = build_regularizer(&op, &Regularizer::dirac(Variant::D2, z).unwrap()).unwrap();
        let q2 = build_regularizer(&op, &Regularizer::Polynomial { a: vec![], b: vec![0.0, 1.0, -z] }).unwrap();
        assert!((q1 - q2).amax() < 1e-14);
    }

    #[test]
    fn indefinite_polynomial_is_reported() {
        let op = op(10);
        let err = build_regularizer(&op, &Regularizer::Polynomial { a: vec![1.0], b: vec![] });
        assert!(matches!(err, Err(Error::IndefiniteRegularizer(_))));
        let err = build_regularizer(&op, &Regularizer::Polynomial { a: vec![0.0, -1.0], b: vec![] });
        assert!(matches!(err, Err(Error::IndefiniteRegularizer(_))));
    }

    #[test]
    fn unnormalized_operator_with_large_z_is_rejected() {
        let c = SimplicialComplex2::build([[0, 1, 2]]).unwrap();
        let op = DiracOperator::<f64>::unweighted(&c, NormalizationMode::None).unwrap();
        // symbol at lambda = sqrt 3: 3 - 0.9 * 3 sqrt 3 < 0
        let err = build_regularizer(&op, &Regularizer::dirac(Variant::D1, 0.9).unwrap());
        assert!(matches!(err, Err(Error::IndefiniteRegularizer(_))));
        assert!(build_regularizer(&op, &Regularizer::dirac(Variant::D1, 0.5).unwrap()).is_ok());
    }

    #[test]
    fn symbol_of_polynomial() {
        let r = Regularizer::Polynomial { a: vec![1.0, 2.0, 3.0], b: vec![5.0] };
        assert_eq!(r.symbol(Family::D1, 2.0), 2.0 + 8.0 + 24.0);
        assert_eq!(r.symbol(Family::D2, 2.0), 10.0);
        assert_eq!(r.symbol(Family::Harmonic, 2.0), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let op = op(4);
        let s = SimplicialSignal::<f64>::zeros(crate::operators::BlockDims::new(1, 1, 1));
        assert!(apply_filter(&op, &FilterSpec::new(Variant::D1, 0.0, 1.0).unwrap(), &s).is_err());
    }
}
