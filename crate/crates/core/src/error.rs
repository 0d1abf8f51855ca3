use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QrError {
    #[error("non-finite value {value} in {what}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("quantile level {0} outside (0, 1)")]
    InvalidTau(f64),

    #[error("invalid check-function parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid tau grid: {0}")]
    InvalidGrid(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("count curve too short: need at least 3 points, got {0}")]
    CurveTooShort(usize),

    #[error("unsupported dimension: crossing detection needs p = 2, got p = {0}")]
    UnsupportedDimension(usize),

    #[error("csv: {0}")]
    Csv(String),

    #[error("csv row {row}, column '{column}': cannot parse '{cell}' as a number")]
    CsvCell {
        row: usize,
        column: String,
        cell: String,
    },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, QrError>;

pub(crate) fn ensure_finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(QrError::NonFinite { what, value })
    }
}
