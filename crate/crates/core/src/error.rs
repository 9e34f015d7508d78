use thiserror::Error;

use crate::svm::SvcModel;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension error: expected {expected}, got {got} ({context})")]
    Dimension {
        expected: usize,
        got: usize,
        context: String,
    },

    #[error("gate construction error: {0}")]
    Gate(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("usage error: {0}")]
    Usage(String),

    /// The SVC solver hit its pass limit. The partially optimized model is kept.
    #[error("convergence error after {passes} passes")]
    Convergence { passes: usize, model: Box<SvcModel> },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("experiment {index} ({name}): {source}")]
    Experiment {
        index: usize,
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(expected: usize, got: usize, context: impl Into<String>) -> Self {
        Error::Dimension {
            expected,
            got,
            context: context.into(),
        }
    }

    /// Tag an error with the pipeline stage it came from.
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
