use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: row {row}: {reason}", path.display())]
    Parse {
        path: PathBuf,
        row: usize,
        reason: String,
    },

    #[error("selftest failed: {0}")]
    Selftest(String),

    #[error(transparent)]
    Core(#[from] bqb_core::Error),
}

impl BenchError {
    /// 1 for bad input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        use bqb_core::Error as E;
        match self {
            BenchError::Validation(_) | BenchError::Config { .. } => 1,
            BenchError::Core(
                E::InvalidGrid(_)
                | E::InvalidParameter { .. }
                | E::NotPowerOfTwo(_)
                | E::GuardExceeded { .. }
                | E::Unsupported(_),
            ) => 1,
            _ => 2,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        BenchError::Validation(msg.into())
    }
}
