use std::path::PathBuf;

use thiserror::Error;

use crate::arff::ArffError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Arff(#[from] ArffError),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    /// A measure or learner precondition does not hold for the given data.
    #[error("{0}")]
    Data(String),

    #[error("{0}")]
    Conflict(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("store at {} is locked by another writer", .0.display())]
    Locked(PathBuf),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Conflict(_) | Error::Locked(_) => 3,
            _ => 2,
        }
    }
}
