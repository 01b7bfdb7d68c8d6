use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("column mismatch: missing [{}], unexpected [{}]", .missing.join(", "), .extra.join(", "))]
    ColumnMismatch { missing: Vec<String>, extra: Vec<String> },

    /// `row` is 1-based and counts data rows only (the header is not row 1).
    #[error("row {row}, column `{column}`: {message}")]
    Cell { row: usize, column: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("table is empty")]
    EmptyTable,

    #[error("{what} fingerprint mismatch: expected {expected}, found {found}")]
    FingerprintMismatch { what: &'static str, expected: String, found: String },

    #[error("malformed {what} at line {line}: {message}")]
    Format { what: &'static str, line: usize, message: String },

    #[error("no calibration grid point produced both error types; sweep: {0}")]
    Calibration(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
