use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DdError {
    /// Non-finite node, scale or argument outside the mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Result magnitude or required work beyond what can be represented.
    #[error("range error: {0}")]
    Range(String),
    /// Caller violated a precondition (ordering, counts, empty input).
    #[error("argument error: {0}")]
    Argument(String),
    /// A series hit its term cap before meeting the truncation criterion.
    #[error("convergence error: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, DdError>;

pub(crate) fn domain(msg: impl Into<String>) -> DdError {
    DdError::Domain(msg.into())
}

pub(crate) fn argument(msg: impl Into<String>) -> DdError {
    DdError::Argument(msg.into())
}
