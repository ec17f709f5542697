use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("simplex {0:?} has more than 3 vertices; only complexes of dimension <= 2 are supported")]
    DimensionTooHigh(Vec<usize>),

    #[error("simplex {0:?} repeats a vertex")]
    RepeatedVertex(Vec<usize>),

    #[error("empty simplex")]
    EmptySimplex,

    #[error("vertex ids must be contiguous 0..N-1, but vertex {0} is missing")]
    NonContiguousVertices(usize),

    #[error("boundary matrix index k = {0} is not supported (expected 1 or 2)")]
    InvalidBoundaryIndex(usize),

    #[error("weight {value} at position {index} of G{level} is not strictly positive")]
    NonPositiveWeight { level: usize, index: usize, value: f64 },

    #[error("dimension mismatch: {what} expected {expected}, got {actual}")]
    DimensionMismatch { what: &'static str, expected: usize, actual: usize },

    #[error("unsupported NGF parameters (flavor {flavor}, beta {beta}); only flavor -1 with beta 0 is implemented")]
    UnsupportedNgf { flavor: i32, beta: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular value decomposition failed to converge")]
    SvdFailure,

    #[error("symmetric eigendecomposition failed to converge")]
    EigenFailure,

    #[error("subspace im(D{0}) is empty on this complex")]
    EmptySubspace(u8),

    #[error("regularizer is indefinite (minimum eigenvalue {0:e})")]
    IndefiniteRegularizer(f64),

    #[error("Cholesky factorization of I + gamma Q broke down")]
    SolverBreakdown,

    #[error("refusing to write non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("noiseless input: reference and noisy signals coincide")]
    ZeroDenominator,

    #[error("edge flow is identically zero and cannot be normalized")]
    ZeroFlow,

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, message: message.into() }
    }
}
