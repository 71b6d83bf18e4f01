//! Error type carrying the process exit code.
//!
//! Exit codes: 0 success, 1 verification or statistical failure, 2 usage,
//! configuration, or IO problems (clap reports its own usage errors with 2).

use retrolab_core::kinematics::KinematicsError;
use retrolab_core::qm::ModelError;
use retrolab_core::sim::SimError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration, arguments, or input files.
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    /// A verification or statistical check failed.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<KinematicsError> for CliError {
    fn from(e: KinematicsError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("malformed JSON: {e}"))
    }
}
