use thiserror::Error;

/// Errors produced by the domain library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("operation requires a non-empty domain")]
    EmptyDomain,
    #[error("counter overflow while counting domain members")]
    Overflow,
    #[error("scheme failed for tuple {tuple}: {reason}")]
    Scheme { tuple: String, reason: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
