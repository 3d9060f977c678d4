use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("precondition failed in {stage}: {source}")]
    Precondition { stage: &'static str, source: sdtwistor::Error },
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("CSV error on {path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("JSON error on {path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

impl CliError {
    /// 3 for configuration/precondition errors, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Precondition { .. } => 3,
            CliError::Io { .. } | CliError::Csv { .. } | CliError::Json { .. } => 4,
        }
    }
}

/// Attach a stage name to library errors.
pub trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError>;
}

impl<T> Stage<T> for sdtwistor::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Precondition { stage, source })
    }
}
