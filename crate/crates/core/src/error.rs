use thiserror::Error;

/// Errors raised by the numerical kernels and the run orchestration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration `{key}`: {message}")]
    Config { key: String, message: String },

    /// A theorem hypothesis required by a diagnostic does not hold.
    #[error("hypothesis violated ({hypothesis}): {message}")]
    Hypothesis {
        hypothesis: &'static str,
        message: String,
    },

    #[error("numerical integrity error: {0}")]
    Integrity(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
