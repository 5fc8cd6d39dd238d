use std::time::Duration;

use thiserror::Error;

pub type Result<T, E = BroadcastError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BroadcastError {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),

    /// The instance admits no (h-hop) broadcast set.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A solver was called outside its precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The instance is too large for the configured caps.
    #[error("intractable: {0}")]
    Intractable(String),

    #[error("time budget of {0:?} exceeded")]
    Timeout(Duration),
}

impl BroadcastError {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, BroadcastError::Infeasible(_))
    }
}
