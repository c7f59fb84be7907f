use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("object index {index} out of range for {n} objects")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("pair ({u}, {v}) has already been queried")]
    AlreadyQueried { u: usize, v: usize },

    #[error("{path}: row {row}: {message}")]
    Load { path: PathBuf, row: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("round {round}: {source}")]
    Round {
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn in_round(self, round: usize) -> Self {
        Error::Round {
            round,
            source: Box::new(self),
        }
    }

    /// True for errors that stem from the experiment configuration or its
    /// inputs rather than from running it.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Load { .. })
    }
}
