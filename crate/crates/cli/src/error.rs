use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] nadyn::Error),
}

impl CliError {
    /// 1 for failed verification or internal faults, 2 for anything the
    /// caller can fix by changing the invocation or its inputs.
    pub fn exit_code(&self) -> ExitCode {
        use nadyn::Error as E;
        match self {
            CliError::Core(E::Verification(_) | E::Internal(_) | E::Arithmetic(_)) => ExitCode::from(1),
            CliError::Write { .. } => ExitCode::from(1),
            _ => ExitCode::from(2),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
