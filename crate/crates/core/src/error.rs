use thiserror::Error;

/// Errors raised by the library.
///
/// The variants map onto the process exit codes used by the command line
/// front-end: usage errors are caller mistakes, invariant failures mean a
/// computed object contradicts a property that must hold.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("internal invariant failure: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! usage {
    ($($arg:tt)*) => {
        $crate::error::Error::Usage(format!($($arg)*))
    };
}

macro_rules! invariant {
    ($($arg:tt)*) => {
        $crate::error::Error::Invariant(format!($($arg)*))
    };
}

pub(crate) use invariant;
pub(crate) use usage;
