use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("division by a non-unit scalar")]
    NonUnitDivision,
    #[error("evaluation at zero")]
    ZeroEvaluation,
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
