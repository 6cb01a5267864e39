use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while configuring or running a simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{block}: non-finite input {value}")]
    NonFinite { block: String, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{block}: denominator roots not strictly inside the unit circle")]
    Unstable { block: String },

    #[error("weight file: {0}")]
    Weights(String),

    #[error("length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    #[error("{path}: line {line}: {msg}")]
    Parse { path: String, line: u64, msg: String },

    #[error("{path}: missing required column `{column}`")]
    MissingColumn { path: String, column: String },

    #[error("step {step}: signal `{signal}` became non-finite")]
    Diverged { step: usize, signal: String },

    #[error("optimizer: {0}")]
    Optimizer(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors that stem from bad inputs rather than a run that went wrong.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Diverged { .. } | Error::Optimizer(_))
    }
}
