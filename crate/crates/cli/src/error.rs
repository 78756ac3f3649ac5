use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation or unreadable input file; exit status 1.
    #[error("{0}")]
    Usage(String),
    /// Input that parses but is not a valid model or fails a check; exit status 2.
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Model(#[from] maxzonoid::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) | CliError::Model(_) => 2,
        }
    }
}
