use thiserror::Error;

/// Failure classes of the command-line tool, each with a fixed exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) | CliError::Parse(_) => 2,
        }
    }
}

impl From<infopower::Error> for CliError {
    fn from(e: infopower::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}
