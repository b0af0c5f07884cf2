use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The floating-point value of the parameter cannot decide a binary digit
    /// of the singularity; an exact rational input is required.
    #[error("precision guard: {0}")]
    PrecisionGuard(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("crossing lies outside the grid, extend the grid: {0}")]
    ExtendGrid(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
