use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("{0}: no data rows")]
    Empty(String),
    #[error("unknown category {value:?} in column {column}")]
    UnknownCategory { column: String, value: String },
    #[error("missing column {0}")]
    MissingColumn(String),
    #[error("column {column} is {found}, expected {expected}")]
    ColumnKind {
        column: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty group: {0}")]
    EmptyGroup(&'static str),
    #[error("sampling requires a non-empty {0}")]
    EmptyCell(String),
    #[error("malformed row {row}: expected {expected} features, got {found}")]
    MalformedRow { row: usize, expected: usize, found: usize },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
