use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by environments, policies, estimators and the harness.
#[derive(Debug, Error)]
pub enum BanditError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for {len} arms")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("estimate undefined: {0}")]
    UndefinedEstimate(String),

    #[error("support violation: target puts mass {target_prob} on action {action} in context {context} but behavior propensity is {behavior_prop}")]
    SupportViolation {
        context: usize,
        action: usize,
        target_prob: f64,
        behavior_prop: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("linear algebra failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl BanditError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        BanditError::InvalidArgument(msg.into())
    }

    /// True when the error stems from user configuration rather than a runtime failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            BanditError::Config(_) | BanditError::InvalidArgument(_) | BanditError::Parse { .. }
        )
    }
}

pub type Result<T, E = BanditError> = std::result::Result<T, E>;
