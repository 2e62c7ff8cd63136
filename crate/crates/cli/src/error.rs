use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] delchan::Error),

    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("writing output: {0}")]
    Output(#[from] io::Error),

    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        use delchan::Error as E;
        let code = match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::Capacity { .. }) => 3,
            CliError::Core(E::Verification(_)) => 1,
            CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::Output(_) | CliError::Mismatch(_) => 1,
        };
        ExitCode::from(code)
    }
}

pub fn io_at(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
