use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected {expected} entries, found {found}")]
    WrongLength { expected: usize, found: usize },

    #[error("dimension {dim} not supported: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("matrix is not Hermitian (max |A - A*| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("not a minimal projection: {reason} (residual {residual:e})")]
    NotMinimalProjection { reason: &'static str, residual: f64 },

    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("measurement directions are linearly dependent (triple product {triple:e})")]
    DegenerateSetup { triple: f64 },

    #[error("probability {value} outside [0, 1]")]
    InvalidProbability { value: f64 },

    #[error("state operator has trace {trace}, expected 1")]
    NotNormalized { trace: f64 },

    #[error("Born value has imaginary part {imag:e}")]
    ComplexBornValue { imag: f64 },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("invalid measurement frame: {0}")]
    InvalidFrame(String),

    #[error("invalid probability table: {0}")]
    InvalidTable(String),

    #[error("frame is rank deficient: rank {rank}, need {required}")]
    Underdetermined { rank: usize, required: usize },

    #[error("probability table is not generated by any operator (residual {residual:e})")]
    Inconsistent { residual: f64 },

    #[error("frame rank {target} not reached after {attempts} attempts")]
    RankNotReached { target: usize, attempts: usize },

    #[error("no witness found after {rays} rays")]
    SearchExhausted { rays: usize },

    #[error("belt parameter r = {r} must be > 1")]
    InvalidBelt { r: f64 },

    #[error("angle out of range: {0}")]
    InvalidAngle(String),

    #[error("inputs are inconsistent: {check} residual {residual:e}")]
    InputInconsistent { check: &'static str, residual: f64 },

    #[error("Gram matrix is singular (min singular value {min_singular:e})")]
    SingularGram { min_singular: f64 },

    #[error("{0}")]
    InvalidInput(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
