use thiserror::Error;

/// Failures of a run. Every variant maps to exit code 2; verdict failures
/// are not errors.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] mclab_core::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type LabResult<T> = Result<T, LabError>;

macro_rules! config_err {
    ($($arg:tt)*) => {
        $crate::error::LabError::Config(format!($($arg)*))
    };
}

pub(crate) use config_err;
