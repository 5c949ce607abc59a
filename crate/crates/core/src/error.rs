//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by configuration validation, numerical kernels, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is inconsistent or out of range.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument violates an operation's preconditions.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numerical kernel failed or produced non-finite values.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// An internal invariant was violated by the caller.
    #[error("logic error: {0}")]
    Logic(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A persisted file does not match the expected format.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Numerical failure tagged with the index of the offending batch entry.
    pub fn non_finite_at(what: &str, index: usize) -> Self {
        Error::Numerical(format!("non-finite {what} at point index {index}"))
    }
}
