use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid sweep spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Core(#[from] nomacov::Error),
    #[error("writing output: {0}")]
    Output(#[from] csv::Error),
}

impl CliError {
    /// 2 for numerical convergence failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(nomacov::Error::Convergence(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
