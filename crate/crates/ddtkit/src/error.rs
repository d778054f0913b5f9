use thiserror::Error;

/// Errors produced by ddtkit operations.
#[derive(Debug, Error)]
pub enum DdtError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The window has no usable spectral energy on the signal span, so
    /// deconvolution cannot proceed.
    #[error("degenerate window: {0}")]
    DegenerateWindow(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DdtError>;

impl DdtError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        DdtError::InvalidArgument(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        DdtError::Format(msg.into())
    }
}
