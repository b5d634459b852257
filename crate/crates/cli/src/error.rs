use std::path::PathBuf;

use dirac_darboux::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const CONFIG: u8 = 2;
    pub const SINGULAR: u8 = 3;
    pub const NUMERIC: u8 = 4;
    pub const THRESHOLD: u8 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Threshold(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Read { .. } => exit::CONFIG,
            CliError::Write { .. } => exit::NUMERIC,
            CliError::Threshold(_) => exit::THRESHOLD,
            CliError::Core(e) => match e {
                CoreError::SingularSeedMatrix { .. } | CoreError::SingularMatrix { .. } => exit::SINGULAR,
                CoreError::InvalidParams(_)
                | CoreError::InvalidGrid(_)
                | CoreError::GridTooSmall { .. }
                | CoreError::DomainMismatch { .. }
                | CoreError::BranchInvalid { .. }
                | CoreError::InvalidLevel(_)
                | CoreError::DegenerateSeeds { .. } => exit::CONFIG,
                _ => exit::NUMERIC,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
