use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite input element at ({row}, {col})")]
    NonFiniteInput { row: usize, col: usize },

    /// A pivot column of the factored panel is exactly zero.
    #[error("singular pivot: column {column} of the panel is exactly zero")]
    SingularPivot { column: usize },

    #[error("zero diagonal entry at position {index} of a triangular factor")]
    ZeroDiagonal { index: usize },

    #[error("non-finite value after step {step} in tile ({row}, {col})")]
    NonFinite { step: usize, row: usize, col: usize },

    #[error("singular system: R has a zero diagonal entry at row {index}")]
    SingularSystem { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown matrix kind `{0}`")]
    UnknownMatrix(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
