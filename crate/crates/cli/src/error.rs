use qfridge::FridgeError;

/// Failures mapped to process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Convergence(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Convergence(_) => 2,
            CliError::Validation(_) => 3,
        }
    }

    /// Model construction errors are problems with the user's parameters.
    pub fn from_model(e: FridgeError) -> Self {
        CliError::Usage(e.to_string())
    }

    /// Errors raised while solving.
    pub fn from_solver(e: FridgeError) -> Self {
        match e {
            FridgeError::NonUniqueStationaryState | FridgeError::Numerical(_) => {
                CliError::Convergence(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}
