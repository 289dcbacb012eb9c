use std::path::PathBuf;

use flc_sldo_core::scenario::RunError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("plot {path}: {message}")]
    Plot { path: PathBuf, message: String },
}

impl SimError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 3 for a numerical blow-up, 4 for a bad config,
    /// 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::Run(RunError::Config(_)) => 4,
            SimError::Run(RunError::BlowUp { .. }) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
