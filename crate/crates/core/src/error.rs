use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// The message without the variant prefix.
    pub fn message(&self) -> &str {
        match self {
            Error::Domain(s) | Error::Range(s) | Error::Config(s) | Error::Numeric(s) | Error::Model(s) | Error::Io(s) => s,
        }
    }

    /// Process exit code: 2 for bad input or configuration, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) | Error::Model(_) => 3,
            _ => 2,
        }
    }
}
