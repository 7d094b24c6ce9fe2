use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cold start: user `{0}` has no training history")]
    ColdStart(String),

    #[error("training diverged (non-finite loss); lower the learning rate (lr = {lr})")]
    Divergence { lr: f64 },

    #[error("Gram matrix inversion failed; increase l2 (currently {l2})")]
    GramInversion { l2: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{file}:{line}:{col}: {msg}")]
    Metric {
        file: String,
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad configuration rather than by the data or
    /// the numerics. The CLI maps these to exit code 2.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Schema(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
