//! Crate-wide error type with CLI exit-code mapping.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: bad hyperparameters, empty dictionaries,
    /// mismatched model kinds.
    #[error("configuration error: {0}")]
    Config(String),
    /// Invalid or unusable input data: malformed records, empty sets,
    /// dimension mismatches between data and models.
    #[error("data error: {0}")]
    Data(String),
    /// Numerical failure during optimization (non-finite loss, divergence).
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 configuration, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) | Error::Io(_) | Error::Json(_) => 3,
            Error::Numerical(_) => 4,
        }
    }

    /// Prefixes the message with the pipeline stage that failed, keeping
    /// the error class (and exit code) intact.
    pub fn in_stage(self, stage: &str) -> Error {
        match self {
            Error::Config(m) => Error::Config(format!("stage '{stage}': {m}")),
            Error::Data(m) => Error::Data(format!("stage '{stage}': {m}")),
            Error::Numerical(m) => Error::Numerical(format!("stage '{stage}': {m}")),
            Error::Io(e) => Error::Data(format!("stage '{stage}': io error: {e}")),
            Error::Json(e) => Error::Data(format!("stage '{stage}': serialization error: {e}")),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
