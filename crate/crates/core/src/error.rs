//! Crate-wide error type. Variants map onto the process exit codes used by
//! the CLI: configuration/schema problems exit 2, solver failures exit 3,
//! failed named checks exit 1.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FdeError {
    /// Invalid configuration or schema violation. `path` is the field path
    /// inside the config document, e.g. `experiments[0].p`.
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    /// An operation was called outside its contract (wrong grid, missing
    /// Dirichlet tag, mismatched sizes).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A parameter is outside the admissible range (p ≤ 1, b ≥ λ₁, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An iterative solver failed to converge; the message carries the last
    /// residual and iteration counts.
    #[error("solver failure: {0}")]
    Solver(String),

    /// A statistical estimate could not be formed (too few samples, refused
    /// fit, degenerate data).
    #[error("estimation error: {0}")]
    Estimation(String),

    /// A named check evaluated to false.
    #[error("check failed: {name}: {message}")]
    CheckFailed { name: String, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl FdeError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        FdeError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Exit code for the CLI contract: 0 success, 1 failed check, 2 schema
    /// violation, 3 solver failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            FdeError::Config { .. } => 2,
            // Parameter preconditions (b ≥ λ₁, ...) are only detectable once
            // solvers run; they abort the pipeline like a solver failure.
            FdeError::Solver(_) | FdeError::Parameter(_) => 3,
            FdeError::CheckFailed { .. } => 1,
            FdeError::Contract(_) | FdeError::Estimation(_) => 1,
            FdeError::Io(_) | FdeError::Json(_) => 1,
        }
    }
}
