use std::path::PathBuf;

use thiserror::Error;

use crate::label::EmotionLabel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure classes, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Data,
    Backend,
}

/// A single unparseable record in an input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    pub line: u64,
    pub message: String,
}

impl std::fmt::Display for RecordError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {malformed} of {total} records malformed (first: {first})")]
    TooManyMalformed {
        path: PathBuf,
        malformed: usize,
        total: usize,
        first: RecordError,
    },

    #[error("unknown emotion label {0:?}")]
    UnknownLabel(String),

    #[error("unknown emotion id {0}")]
    UnknownLabelId(i64),

    #[error("class {0} has no examples")]
    MissingClass(EmotionLabel),

    #[error("class {label} has {count} example(s); at least 2 are required to split")]
    ClassTooSmall { label: EmotionLabel, count: usize },

    #[error("non-finite logit at index {0}")]
    NonFiniteLogit(usize),

    #[error("length mismatch: {truths} truths vs {preds} predictions")]
    LengthMismatch { truths: usize, preds: usize },

    #[error("ambiguous label where a concrete emotion is required ({0})")]
    AmbiguousLabel(String),

    #[error("duplicate entry id {0:?}")]
    DuplicateId(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("backend error{}: {message}", post_id.as_deref().map(|id| format!(" on post {id}")).unwrap_or_default())]
    Backend {
        post_id: Option<String>,
        message: String,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Validation(_) => ErrorKind::Validation,
            Error::Backend { .. } => ErrorKind::Backend,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn backend(message: impl Into<String>) -> Self {
        Error::Backend {
            post_id: None,
            message: message.into(),
        }
    }

    /// Attaches a post id to a backend error; other variants pass through.
    pub fn with_post_id(self, id: &str) -> Self {
        match self {
            Error::Backend { message, .. } => Error::Backend {
                post_id: Some(id.to_string()),
                message,
            },
            other => other,
        }
    }
}
