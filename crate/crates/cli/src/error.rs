use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("model error: {0}")]
    Model(#[from] kdivis::Error),
    #[error("sweep `{name}` has {cells} cells, over the budget of {budget}")]
    Budget { name: String, cells: usize, budget: usize },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Check(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// Prefixes the message of a config error.
    pub fn context(self, prefix: &str) -> Self {
        match self {
            CliError::Config(msg) => CliError::Config(format!("{prefix}: {msg}")),
            other => other,
        }
    }

    /// Message without the category prefix.
    pub fn detail(&self) -> String {
        match self {
            CliError::Config(msg) => msg.clone(),
            other => other.to_string(),
        }
    }

    /// 1 for configuration problems, 2 for everything that fails after the
    /// configuration was accepted.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(1),
            _ => ExitCode::from(2),
        }
    }
}
