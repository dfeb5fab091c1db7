use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A function was called with arguments outside its domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An experiment configuration could not be parsed or violates a constraint.
    #[error("configuration error: {0}")]
    Config(String),

    /// Wide-beam synthesis produced a degenerate codeword.
    #[error("synthesis failed: {0}")]
    Synthesis(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
