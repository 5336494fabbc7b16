use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("factor dimension must be at least 2, got {0}")]
    InvalidFactorDim(usize),

    #[error("factor index {index} out of range for {factors} factors")]
    IndexOutOfRange { index: usize, factors: usize },

    #[error("factor index {0} listed more than once")]
    DuplicateIndex(usize),

    #[error("factor subset must be nonempty and proper")]
    ImproperSubset,

    #[error("vector norm {norm} deviates from 1")]
    Unnormalized { norm: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidDensity(&'static str),

    #[error("not an orthogonal projector: {0}")]
    NotProjector(&'static str),

    #[error("condition has probability {probability:e}; conditional state is undefined")]
    ZeroProbabilityCondition { probability: f64 },

    #[error("bit strings differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid bit character {0:?}")]
    InvalidBit(char),

    #[error("message is empty")]
    EmptyMessage,

    #[error("measurement basis does not match the preparation basis")]
    BasisMismatch,

    #[error("physical preparation disagrees with direct encoding (residual {residual:e})")]
    PreparationMismatch { residual: f64 },
}
