//! Library layer behind the `ujel` binary: CSV ingestion, scenario
//! configuration, report rendering, and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod csv_io;
pub mod report;

use std::fmt;

/// Errors split by exit code: usage problems exit 2, numeric or data
/// failures exit 1.
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Failure(anyhow::Error),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(msg) => write!(f, "{msg}"),
            AppError::Failure(err) => write!(f, "{err:#}"),
        }
    }
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Failure(_) => 1,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }
}

impl From<anyhow::Error> for AppError {
    fn from(err: anyhow::Error) -> Self {
        AppError::Failure(err)
    }
}

impl From<ujel_core::Error> for AppError {
    fn from(err: ujel_core::Error) -> Self {
        // Unknown kernels are a command-line mistake, not a numeric failure.
        match &err {
            ujel_core::Error::UnknownKernel { .. } => AppError::Usage(err.to_string()),
            _ => AppError::Failure(anyhow::Error::new(err)),
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
