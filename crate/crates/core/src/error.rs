use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver, the special functions and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// Input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Ill-formed arguments (sizes, counts, incompatible grids).
    #[error("argument error: {0}")]
    Argument(String),
    /// A factorization or iteration broke down.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A truncated series or quadrature could not reach the requested tolerance.
    #[error("truncation error: requested {requested:e}, achieved {achieved:e}")]
    Truncation { requested: f64, achieved: f64 },
    /// Refused to start a run that exceeds the configured resource guard.
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}
