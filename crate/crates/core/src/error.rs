use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix/vector shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Input values violate a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// An exact enumeration was requested above the configured cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Iterative dynamics ran out of sweeps before reaching a fixed point.
    /// Carries the state reached so callers can inspect or resume.
    #[error("no fixed point within {max_sweeps} sweeps")]
    NonConvergence {
        max_sweeps: usize,
        last_point: Vec<i32>,
        last_value: f64,
    },

    /// A certificate produced internally failed its own re-verification.
    /// This is a bug, never an expected outcome.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
