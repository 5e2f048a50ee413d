//! Error type shared by all modules, split by how the CLI maps failures to
//! exit codes: configuration/invariant problems vs. I/O and parse problems.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value or argument combination.
    #[error("config error: {0}")]
    Config(String),

    /// A runtime invariant that should hold by construction was violated.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// Malformed input data.
    #[error("parse error: {0}")]
    Parse(String),

    /// Filesystem or stream failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// Process exit code the CLI should use for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Invariant(_) => 1,
            Error::Parse(_) | Error::Io(_) => 2,
        }
    }
}
