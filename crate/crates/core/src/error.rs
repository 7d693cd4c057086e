use thiserror::Error;

/// Errors raised by the library. Precision problems are always reported,
/// never silently truncated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mismatched operands: {0}")]
    Mismatch(String),
    #[error("precision overflow: {0}")]
    Precision(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("length cap {cap} exceeded")]
    LengthCap { cap: usize },
    #[error("not in the domain: {0}")]
    Domain(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn precision<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precision(msg.into()))
}
