use std::io;
use std::path::Path;

use thiserror::Error;

pub type Result<T, E = ToolError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ToolError {
    #[error(transparent)]
    Core(#[from] coconvex_core::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("newick, byte {offset}: {message}")]
    Newick { offset: usize, message: String },

    #[error("taxon map line {line}: {message}")]
    Taxa { line: usize, message: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("{0}")]
    Usage(String),
}

impl ToolError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        ToolError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ToolError::Core(e) => e.code(),
            ToolError::Io { .. } => "io",
            ToolError::Newick { .. } => "newick_syntax",
            ToolError::Taxa { .. } => "taxon_map",
            ToolError::Csv(_) => "csv",
            ToolError::Json(_) => "json",
            ToolError::Checkpoint(_) => "checkpoint",
            ToolError::Usage(_) => "usage",
        }
    }

    /// Process exit status: 3 for guard refusals, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            ToolError::Core(coconvex_core::Error::GuardExceeded { .. }) => 3,
            _ => 2,
        }
    }
}
