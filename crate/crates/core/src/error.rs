use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid block: {0}")]
    InvalidBlock(String),

    #[error("invalid approximation: {0}")]
    InvalidApproximation(String),

    #[error("index {requested} out of range (available {available})")]
    OutOfRange { requested: usize, available: usize },

    #[error("shape mismatch: expected shape {expected}, got {found}")]
    Shape { expected: usize, found: usize },

    #[error("arity mismatch: expected {expected}, got {found}")]
    Arity { expected: usize, found: usize },

    #[error("incompatible glue: {0}")]
    IncompatibleGlue(String),

    #[error("input is not total: {0}")]
    Totality(String),

    #[error("structural error: {0}")]
    Structure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Usage(String),
}
