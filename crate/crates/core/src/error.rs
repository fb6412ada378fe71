//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by profile evaluation, solvers, and state construction.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the interval on which a quantity is defined.
    #[error("time {t} outside domain [{lo}, {hi}] of {what}")]
    OutOfDomain {
        what: &'static str,
        t: f64,
        lo: f64,
        hi: f64,
    },

    /// Invalid construction input (bad node ordering, non-finite data, ...).
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    /// A monitored numerical tolerance was exceeded.
    #[error("accuracy failure in {what}: {value:.3e} exceeds limit {limit:.3e}")]
    Accuracy {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    /// Sampling density insufficient (phase jumps, stencil too coarse).
    #[error("sampling too coarse: {0}")]
    Sampling(String),

    /// Two wave samples live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Requested data exits the region covered by a grid or solution.
    #[error("coverage: {0}")]
    Coverage(String),

    /// Malformed configuration or profile document.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a numerical tolerance rather than of input validation.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Accuracy { .. } | Error::Sampling(_) | Error::Coverage(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
