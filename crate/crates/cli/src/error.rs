use thiserror::Error;

/// Failures surfaced by the command line, each with a fixed exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input.
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed input that a precondition rejects.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A pipeline stage or check failed.
    #[error("stage {stage} failed: {message}")]
    Stage { stage: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Stage { .. } => 4,
        }
    }

    pub fn stage(stage: &str, message: impl ToString) -> Self {
        CliError::Stage { stage: stage.to_string(), message: message.to_string() }
    }
}
