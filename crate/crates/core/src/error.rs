use thiserror::Error;

/// Errors raised by the PTM library.
#[derive(Debug, Error)]
pub enum PtmError {
    /// An argument lies outside the domain of the operation (bad digit,
    /// non power-of-two dimension, rank out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The operation does not accept this channel representation.
    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),

    /// A document failed schema or consistency validation. `path` names the
    /// offending field.
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, PtmError>;

pub(crate) fn domain(msg: impl Into<String>) -> PtmError {
    PtmError::Domain(msg.into())
}

pub(crate) fn mismatch(msg: impl Into<String>) -> PtmError {
    PtmError::DimensionMismatch(msg.into())
}
