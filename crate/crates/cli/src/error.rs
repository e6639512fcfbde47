use std::path::PathBuf;

use origami_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {msg}")]
    Config { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
    /// An embedded check did not hold; the report was still written.
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Process exit status.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) | CliError::Config { .. } => 2,
            CliError::Io { .. } | CliError::Csv(_) => 3,
            CliError::Core(e) => core_family(e),
        }
    }
}

/// Exit status by error family: input 10, geometry 11, budget 12, estimation 13.
fn core_family(e: &CoreError) -> u8 {
    use CoreError::*;
    match e {
        NotBijective(_) | NotTransitive { .. } | SizeMismatch(..) | NotUnimodular(_) | OutOfRange(_)
        | NonPositiveQuotient(_) | Parse(_) | InvalidArgument(_) => 10,
        HitsConeVertex { .. } | ConeVertexInInterior(_) | StartOnSingularLeaf(_) | ParallelToDecomposition
        | WordTooShort { .. } | PreconditionViolated(_) => 11,
        CapExceeded(_) | CapTooSmall(_) | Overflow(_) => 12,
        ExponentTooSmall(_) | InsufficientSpan(_) => 13,
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
