use std::path::Path;

use thiserror::Error;

/// Everything that can stop a run. The variant decides the exit code.
#[derive(Debug, Error)]
pub enum AppError {
    /// Bad configuration, unreadable inputs or an unwritable output
    /// directory, all detected before any numerics run.
    #[error("{0}")]
    Validation(String),
    /// The numerics failed: an instability, a NaN, or a solver that did not
    /// converge.
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) | AppError::Io { .. } => 2,
            AppError::Numerical(_) => 3,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        AppError::Io { path: path.display().to_string(), source }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        AppError::Validation(msg.into())
    }
}

impl From<solitonsim_core::Error> for AppError {
    fn from(e: solitonsim_core::Error) -> Self {
        use solitonsim_core::Error as E;
        match e {
            E::Instability { .. } | E::NonFinite { .. } => AppError::Numerical(e.to_string()),
            _ => AppError::Validation(e.to_string()),
        }
    }
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;
