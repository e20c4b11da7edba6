use thiserror::Error;

/// Errors shared across the library. `AssertionViolation` marks a failed
/// mathematical assertion (a finding worth reporting), not a crash.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("budget exceeded: {what} would need ~{estimate} units (limit {limit})")]
    BudgetExceeded {
        what: String,
        estimate: u128,
        limit: u128,
    },
    #[error("assertion violated: {0}")]
    AssertionViolation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    /// Process exit code convention: 2 invalid params, 3 budget, 4 assertion.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_) => 2,
            Error::BudgetExceeded { .. } => 3,
            Error::AssertionViolation(_) => 4,
            Error::Internal(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
