use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An intermediate or final value does not fit the exact integer type.
    #[error("range error: {0}")]
    Range(String),
    /// A checkpoint or report failed validation.
    #[error("integrity error in `{field}`: {detail}")]
    Integrity { field: String, detail: String },
    /// A table could not be allocated.
    #[error("resource error: {0}")]
    Resource(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn range(msg: impl Into<String>) -> Error {
    Error::Range(msg.into())
}

pub(crate) fn integrity(field: impl Into<String>, detail: impl Into<String>) -> Error {
    Error::Integrity {
        field: field.into(),
        detail: detail.into(),
    }
}
