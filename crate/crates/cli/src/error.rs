use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] maskopt::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub const USAGE: u8 = 2;
    pub const DATA: u8 = 3;
    pub const INFEASIBLE: u8 = 4;

    pub fn exit_code(&self) -> u8 {
        use maskopt::Error as E;
        match self {
            CliError::Usage(_) => Self::USAGE,
            CliError::Core(E::Infeasible(_)) => Self::INFEASIBLE,
            CliError::Core(E::InvalidParameter { .. } | E::InvalidDimensions { .. }) => Self::USAGE,
            _ => Self::DATA,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
