use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 1 check failure, 2 config error, 3 precision exhaustion.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Check(_) => 1,
            Error::Config(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Precision(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
