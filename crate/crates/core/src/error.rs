use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("homogeneity mismatch: expected degree {expected}, found {found}")]
    HomogeneityMismatch { expected: i32, found: i32 },
    #[error("resolution exceeded: {0}")]
    ResolutionExceeded(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("invalid h function: {0}")]
    InvalidH(String),
    #[error("unsupported form: {0}")]
    UnsupportedForm(String),
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
