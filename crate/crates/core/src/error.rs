use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated a precondition (bad argument, mismatched moduli, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// An arithmetic result that cannot occur for a prime modulus.
    #[error("integrity error: {0}")]
    Integrity(String),

    /// Input exceeds a fixed size ceiling (modulus width, enumeration cap).
    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// Process exit code used by the CLI: 1 usage, 2 data/parse, 3 capacity.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Integrity(_) | Error::Parse { .. } | Error::Io(_) => 2,
            Error::Capacity(_) => 3,
        }
    }
}
