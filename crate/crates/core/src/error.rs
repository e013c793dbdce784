use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used to pick a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad parameters or an impossible request.
    Usage,
    /// Malformed or out-of-domain input data.
    Data,
    /// A numerical procedure failed on valid input.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("kernel evaluation failed at pair ({i}, {j}): {source}")]
    KernelEntry {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: max asymmetry {max_asymmetry:e} exceeds {tolerance:e}")]
    NotSymmetric { max_asymmetry: f64, tolerance: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal residual {residual:e}, target {target:e})")]
    NoConvergence { sweeps: usize, residual: f64, target: f64 },

    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),

    #[error("nonpositive diagonal entry {value:e} at index {index}")]
    NonpositiveDiagonal { index: usize, value: f64 },

    #[error("matrix is not positive definite: pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("no eigenvalue above the positivity floor")]
    NoPositiveSpectrum,

    #[error("index {index} out of range for {len} components")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("requested {m} landmarks from only {n} samples")]
    TooManyLandmarks { m: usize, n: usize },

    #[error("invalid landmark set: {0}")]
    InvalidLandmarks(String),

    #[error("eigenvalue must be positive, got {0:e}")]
    NonpositiveEigenvalue(f64),

    #[error("paired kernels differ in order: {x} vs {y}")]
    OrderMismatch { x: usize, y: usize },

    #[error("at least {required} samples are required, got {found}")]
    TooFewSamples { required: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("model carries no training data; out-of-sample evaluation is unavailable")]
    MissingTrainingData,

    #[error("model format version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("corrupt model: {0}")]
    CorruptModel(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidParameter(_)
            | Error::IndexOutOfRange { .. }
            | Error::TooManyLandmarks { .. }
            | Error::InvalidLandmarks(_)
            | Error::NonpositiveEigenvalue(_)
            | Error::MissingTrainingData => ErrorClass::Usage,
            Error::NoConvergence { .. } | Error::NotPositiveDefinite { .. } | Error::NoPositiveSpectrum => {
                ErrorClass::Numerical
            }
            Error::KernelEntry { source, .. } => source.class(),
            _ => ErrorClass::Data,
        }
    }
}
