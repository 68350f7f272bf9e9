//! Crate-wide error type.
//!
//! The variants mirror the process exit codes of the CLI: config/parameter
//! problems, bad data, and I/O failures are distinguishable by the caller.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Input data is unusable (non-finite heights, malformed file, ...).
    #[error("data error: {0}")]
    Data(String),

    /// A configuration file or derived configuration is invalid.
    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
