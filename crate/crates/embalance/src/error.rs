//! Toolkit-wide error type.

use std::io;
use thiserror::Error;

/// Errors raised by the toolkit. Variants map onto CLI exit codes:
/// config errors exit 2, data and I/O errors exit 3, numerical failures exit 4.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters or configuration.
    #[error("config error: {0}")]
    Config(String),
    /// Malformed input data or a violated data invariant.
    #[error("data error: {0}")]
    Data(String),
    /// Numerical failure (divergence, non-finite values).
    #[error("numerical failure: {0}")]
    Numeric(String),
    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) | Error::Io(_) => 3,
            Error::Numeric(_) => 4,
        }
    }

    /// Prefix the error message with pipeline phase context.
    pub fn in_phase(self, phase: &str) -> Self {
        match self {
            Error::Config(m) => Error::Config(format!("[{phase}] {m}")),
            Error::Data(m) => Error::Data(format!("[{phase}] {m}")),
            Error::Numeric(m) => Error::Numeric(format!("[{phase}] {m}")),
            Error::Io(e) => Error::Data(format!("[{phase}] i/o error: {e}")),
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
