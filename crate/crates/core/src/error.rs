use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cone is not full-dimensional")]
    ConeNotFullDimensional,

    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("variety `{0}` has no section oracle")]
    NoOracle(String),

    #[error("canonical report is not free")]
    ReportNotFree,

    #[error("enumeration bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("dimension does not fit in 64 bits")]
    Overflow,
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
