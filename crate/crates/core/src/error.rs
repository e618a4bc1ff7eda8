use thiserror::Error;

/// Errors raised by the billiard toolkit.
///
/// The variants map onto the CLI exit codes: `Domain` and `Precondition` are
/// caller errors (exit 1), `Convergence` is a solver failure (exit 2).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A structural requirement on the inputs is not met.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// The input profile is constant where a varying one is required.
    #[error("degenerate profile: {0}")]
    Degenerate(String),
    /// An iterative solver exhausted its budget.
    #[error("no convergence: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
