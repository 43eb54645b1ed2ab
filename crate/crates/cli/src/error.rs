use thiserror::Error;

/// Failures of a run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("compute aborted: {0}")]
    Compute(#[source] pmelab_core::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{failed} hard check(s) failed")]
    ChecksFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed { .. } => 2,
            CliError::Config(_) => 3,
            CliError::Compute(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<pmelab_core::Error> for CliError {
    fn from(e: pmelab_core::Error) -> Self {
        match e {
            pmelab_core::Error::Io(io) => CliError::Io(io),
            other => CliError::Compute(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Maps a core validation failure to a config error.
pub(crate) fn config_err(e: pmelab_core::Error) -> CliError {
    CliError::Config(e.to_string())
}
