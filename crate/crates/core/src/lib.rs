//! Signal processing on two-dimensional simplicial complexes with the Dirac operator.
//!
//! Signals live on vertices, edges and triangles at once. The Dirac operator couples
//! neighbouring dimensions through the boundary maps, squares to the block-diagonal
//! Hodge Laplacian, and its eigenvectors split into aligned (positive eigenvalue),
//! anti-aligned (negative eigenvalue) and harmonic families. Polynomial regularizers
//! in `D1` and `D2` give IIR filters that favour one alignment over the other.
//!
//! ```
//! use dirac::{Complex, Dirac, NormalizationMode, SpectralBasis, Variant};
//!
//! let complex = Complex::build([[0, 1, 2], [1, 2, 3]]).unwrap();
//! let op = Dirac::unweighted(&complex, NormalizationMode::Spectral).unwrap();
//! let basis = SpectralBasis::compute(&op).unwrap();
//! assert_eq!(basis.betti_numbers(&complex).unwrap(), (1, 0, 0));
//! let planted = basis.planted_eigenvector(Variant::D1).unwrap();
//! assert!((planted.norm() - 1.0).abs() < 1e-12);
//! ```

// `!(x > 0)` style comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex;
pub mod error;
pub mod experiments;
pub mod filters;
pub mod io;
pub mod operators;
pub mod scalar;
pub mod spectral;

pub use complex::{grid_complex, ngf_generate, weighted_boundary, NgfConfig, Simplex, SimplicialComplex2, WeightingScheme};
pub use error::{Error, Result};
pub use experiments::{
    drifter_total_signal, relative_error, run_experiment, sample_noise, ErrorCurve, ErrorPoint, ExperimentConfig,
    NoiseKind, NoiseSpec,
};
pub use filters::{apply_filter, build_regularizer, frequency_response, Filter, FilterResult, FilterSpec, Regularizer};
pub use operators::{BlockDims, DiracOperator, HodgeLaplacians, Normalization, NormalizationMode, SimplicialSignal};
pub use scalar::Scalar;
pub use spectral::{Alignment, Family, SignalDecomposition, SpectralBasis, Variant};

pub type Complex = SimplicialComplex2;

pub type Dirac = DiracOperator<f64>;
pub type Dirac32 = DiracOperator<f32>;
pub type Signal = SimplicialSignal<f64>;
pub type Signal32 = SimplicialSignal<f32>;
pub type Basis = SpectralBasis<f64>;
pub type Basis32 = SpectralBasis<f32>;
pub type Weights = WeightingScheme<f64>;
pub type Spec = FilterSpec<f64>;
