use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config file {0} does not exist")]
    MissingFile(PathBuf),
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("unknown keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("{key} = {value} is out of range: {reason}")]
    OutOfRange { key: String, value: String, reason: String },
    #[error("config is for `{config}` but `{requested}` was requested")]
    SubcommandMismatch { config: String, requested: String },
    #[error("refusing to write non-finite value in row {row}, column {column}")]
    NonFinite { row: usize, column: String },
    #[error("row {row} has {got} cells, expected {expected}")]
    RowWidth { row: usize, got: usize, expected: usize },
    #[error(transparent)]
    Module(#[from] nlskdv_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn range(key: &str, value: impl std::fmt::Display, reason: &str) -> Self {
        Self::OutOfRange {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
