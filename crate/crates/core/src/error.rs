//! Error types shared across the library.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation requested at a genuine singularity (e.g. a kernel at the origin).
    #[error("singularity error: {0}")]
    Singularity(String),

    /// A stated precondition on the input data is violated.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// The requested tolerance cannot be certified (tail bounds, extrapolation
    /// oscillation, quadrature non-convergence).
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// An iterative solver failed to converge.
    #[error("solver error: {0}")]
    Solver(String),

    /// Malformed configuration or unusable input file.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub(crate) fn singular(msg: impl Into<String>) -> Self {
        Error::Singularity(msg.into())
    }
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
    pub(crate) fn accuracy(msg: impl Into<String>) -> Self {
        Error::Accuracy(msg.into())
    }
}
