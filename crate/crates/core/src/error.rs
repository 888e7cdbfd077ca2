//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible vector/matrix/network dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A type invariant or call contract was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Training risk blew up or became non-finite.
    #[error("training diverged at step {step}: risk {risk}")]
    Divergence { step: usize, risk: f64 },

    /// Dataset failed validation; carries the offending index pairs.
    #[error("degenerate dataset: {reason}")]
    InvalidData {
        reason: String,
        pairs: Vec<(usize, usize)>,
    },

    /// Serialized artifact declares a schema major we do not read.
    #[error("unsupported schema {found:?}, expected major {expected}")]
    Schema { found: String, expected: u32 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
