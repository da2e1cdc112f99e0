//! IO, file formats, and pipeline stages around `adsb-core`.

pub mod config;
pub mod fixture;
pub mod formats;
pub mod manifest;
pub mod report;
pub mod snapshot;
pub mod stages;

use std::path::PathBuf;

/// Pipeline failures, grouped by exit-code class.
#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl PipelineError {
    pub fn data(msg: impl Into<String>) -> Self {
        PipelineError::Data(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 usage, 2 data, 3 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) => 1,
            PipelineError::Data(_) => 2,
            PipelineError::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;
