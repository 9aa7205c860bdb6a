use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("coordinate {coord:?} does not fit shape {shape:?}")]
    CoordinateOutOfRange { coord: Vec<usize>, shape: Vec<usize> },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("pattern has no ones")]
    EmptyPattern,

    #[error("invalid axis permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    #[error("brute-force cap exceeded: {work} candidate configurations > cap {cap}")]
    CapExceeded { work: u128, cap: u128 },

    #[error("value exceeds guard {guard}")]
    ExceedsGuard { guard: u128 },

    #[error("invalid forbidden family: {0}")]
    InvalidFamily(String),

    #[error("search witness failed revalidation")]
    WitnessInvalid,

    #[error("search not exact: {0}")]
    Inconclusive(String),

    #[error("division by zero: {0}")]
    ZeroDenominator(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
