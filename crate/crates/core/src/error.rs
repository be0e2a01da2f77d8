use std::path::PathBuf;

use crate::bag::Violation;

pub type Result<T, E = MimlError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum MimlError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("metric `{0}` is undefined: no case qualifies")]
    UndefinedMetric(&'static str),

    #[error("dataset validation failed: {}", summarize(.0))]
    Validation(Vec<Violation>),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("training failed: {0}")]
    Training(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl MimlError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        MimlError::InvalidArgument(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MimlError::Io {
            path: path.into(),
            source,
        }
    }
}

fn summarize(violations: &[Violation]) -> String {
    let mut out = violations
        .iter()
        .take(3)
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ");
    if violations.len() > 3 {
        out.push_str(&format!(" (and {} more)", violations.len() - 3));
    }
    out
}
