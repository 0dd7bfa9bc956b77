use std::path::PathBuf;

use thiserror::Error;
use werner_core::ErrorKind;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: werner_core::Error },

    #[error(transparent)]
    Core(#[from] werner_core::Error),

    #[error("failed to configure worker threads: {0}")]
    Threads(String),

    #[error("failed to write output: {0}")]
    Output(String),
}

impl CliError {
    /// 1 I/O, 3 parse, 4 domain, 5 cap, 6 numerical. Clap uses 2.
    pub fn exit_code(&self) -> u8 {
        let kind = match self {
            CliError::Io { .. } | CliError::Threads(_) | CliError::Output(_) => return 1,
            CliError::Input { source, .. } | CliError::Core(source) => source.kind(),
        };
        match kind {
            ErrorKind::Parse => 3,
            ErrorKind::Domain => 4,
            ErrorKind::Cap => 5,
            ErrorKind::Numerical => 6,
        }
    }
}
