use thiserror::Error;

/// Errors produced by landscape construction, analysis and search.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected} features, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("global minimum is unknown for this landscape: {0}")]
    MinimumUnknown(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("undefined statistic: {0}")]
    UndefinedStatistic(String),

    #[error("enumeration budget exceeded: {required} evaluations required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("malformed document: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid_param(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn invalid_input(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
