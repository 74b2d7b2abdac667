use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("improper transfer function: numerator degree {num} exceeds denominator degree {den}")]
    ImproperTransferFunction { num: usize, den: usize },

    #[error("algebraic loop: 1 + D_plant * D_controller = {0} is singular")]
    AlgebraicLoop(f64),

    #[error("relative degree violation: CB = {0} (must be nonzero)")]
    RelativeDegree(f64),

    #[error("system has a nonzero feedthrough term D = {0}; lifted simulation needs a strictly proper system")]
    Feedthrough(f64),

    #[error("random system sampling budget of {0} attempts exhausted")]
    SamplingBudget(usize),

    #[error("infeasible data length: {0}")]
    InsufficientData(String),

    #[error("input is not persistently exciting: {0}")]
    NotPersistentlyExciting(String),

    #[error("zero energy signal: {0}")]
    ZeroEnergy(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
