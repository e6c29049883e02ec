use std::path::PathBuf;

use thiserror::Error;

/// Failure of a CLI command, carrying its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config, flag or expression. Exit code 2.
    #[error("{0}")]
    Config(String),
    /// A numerical step failed on otherwise valid input. Exit code 3.
    #[error("{0}")]
    Compute(String),
    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Classify a library error: construction problems are config errors,
    /// everything else is a computation error.
    pub fn from_core(context: &str, err: hh_interval::Error) -> Self {
        let msg = if context.is_empty() {
            err.to_string()
        } else {
            format!("{context}: {err}")
        };
        if err.is_input_error() {
            CliError::Config(msg)
        } else {
            CliError::Compute(msg)
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) | CliError::Output { .. } => 3,
        }
    }
}
