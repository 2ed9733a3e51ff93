use std::io;
use std::path::PathBuf;

use helixlab_core::GeomError;
use thiserror::Error;

pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed curve, field, metric or configuration input.
    #[error("{0}")]
    Input(String),
    #[error("unknown gallery entry '{0}'")]
    UnknownEntry(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    /// Failure inside the geometric pipeline.
    #[error("computation failed: {0}")]
    Compute(#[from] GeomError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => EXIT_COMPUTE,
            _ => EXIT_INPUT,
        }
    }

    pub(crate) fn input(context: &str, e: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{context}: {e}"))
    }
}
