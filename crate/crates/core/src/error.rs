use thiserror::Error;

/// Error classes raised by the library. The CLI maps them onto exit codes:
/// configuration/argument problems exit with 1, numeric failures with 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("config error (line {line}): {message}")]
    Config { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// True for errors caused by bad user input rather than by the numerics.
    pub fn is_config_class(&self) -> bool {
        matches!(
            self,
            Error::Argument(_) | Error::Config { .. } | Error::InvalidConfig(_) | Error::Format(_) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
