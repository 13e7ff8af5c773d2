use thiserror::Error;

/// Errors raised by the library.
///
/// Usage and parse errors describe bad input. `Consistency` signals a bug in
/// the library itself: it is never expected on well-formed input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("integrality violation: {0}")]
    Integrality(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
