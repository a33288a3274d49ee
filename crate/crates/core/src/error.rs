use thiserror::Error;

/// Errors raised by the numerics in this crate.
///
/// Every variant maps onto a stable category string so front ends can
/// report failures in a machine-readable way.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A point, map or parameter lies outside the region where the
    /// operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed arguments (wrong dimension, too few samples, ...).
    #[error("argument error: {0}")]
    Argument(String),

    /// The operation does not handle this kind of domain.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative method failed to converge or produced inconsistent
    /// output.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// JSON specs that do not parse.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Argument(_) => "argument",
            Error::Unsupported(_) => "unsupported",
            Error::Numerical(_) => "numerical",
            Error::Parse(_) => "parse",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
