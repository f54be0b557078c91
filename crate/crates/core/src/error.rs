use thiserror::Error;

#[derive(Debug, Error)]
pub enum DcError {
    /// A caller broke an operation's preconditions (dimension mismatch,
    /// invalid parameter, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed instance container: {0}")]
    Container(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DcError>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(DcError::Contract(msg.into()))
}
