use std::io;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("{0}")]
    Budget(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 for bad input or I/O, 2 for a violated invariant, 3 for an exhausted budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 2,
            CliError::Budget(_) => 3,
            _ => 1,
        }
    }
}

impl From<kwise_core::Error> for CliError {
    fn from(e: kwise_core::Error) -> Self {
        match e {
            kwise_core::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            kwise_core::Error::Disagreement(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
