use std::io;

use crate::sampling::Subset;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("invalid dimensions {rows}x{cols}: {reason}")]
    InvalidDimensions {
        rows: usize,
        cols: usize,
        reason: &'static str,
    },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("signal is identically zero and cannot be normalized")]
    ZeroSignal,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("subset {0} already present in the pattern")]
    DuplicateSubset(Subset),
    #[error("subset {subset} is not a member of the {family} family")]
    NotInFamily { subset: Subset, family: String },
    #[error("infeasible configuration: {0}")]
    Infeasible(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
