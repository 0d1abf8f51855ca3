use flexqr::QrError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Solver(_) => 4,
        }
    }

    /// Data error annotated with the file it came from.
    pub fn data_at(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        let msg = err.to_string();
        let shown = path.display().to_string();
        if msg.contains(&shown) {
            CliError::Data(msg)
        } else {
            CliError::Data(format!("{shown}: {msg}"))
        }
    }
}

impl From<QrError> for CliError {
    fn from(err: QrError) -> Self {
        match err {
            QrError::InvalidTau(_)
            | QrError::InvalidParams(_)
            | QrError::InvalidGrid(_)
            | QrError::InvalidConfig(_) => CliError::Usage(err.to_string()),
            QrError::Solver(_) => CliError::Solver(err.to_string()),
            _ => CliError::Data(err.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
