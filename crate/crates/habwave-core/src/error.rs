//! Error type shared by every module in the crate.
//!
//! Construction errors (bad parameters, mismatched grids) are separated from
//! runtime failures (divergent integrals, stalled iterations) so callers can
//! map them onto distinct exit codes.

use thiserror::Error;

/// Errors produced by constructors and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A structural parameter is out of range, non-finite, or in the wrong order.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        /// Name of the offending parameter.
        name: &'static str,
        /// Human-readable description of what went wrong.
        reason: String,
    },

    /// Two fields defined on different grids were combined.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The truncation window leaves more probability mass outside than allowed.
    #[error("truncation radius {radius} too small: tail mass {tail_mass:.3e} exceeds {limit:.1e}")]
    InsufficientTruncation {
        /// Radius of the truncation window.
        radius: f64,
        /// Upper bound on the mass beyond the window.
        tail_mass: f64,
        /// Maximum tail mass the quadrature tolerates.
        limit: f64,
    },

    /// The moment generating function does not exist at the requested argument.
    #[error("moment generating function diverges at mu = {mu}")]
    MgfDiverges {
        /// Argument at which the integral diverges.
        mu: f64,
    },

    /// A standing modelling assumption required by the routine does not hold.
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    /// A numerical precondition failed (empty window, non-finite data, ...).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An iteration exhausted its budget before reaching its tolerance.
    #[error("no convergence after {iterations} iterations (last delta {last_delta:.3e})")]
    NoConvergence {
        /// Number of iterations performed.
        iterations: usize,
        /// Size of the last update when the budget ran out.
        last_delta: f64,
    },

    /// A step of a monotone iteration moved in the forbidden direction.
    #[error("monotonicity violation at x = {x}: iterate increased by {increase:.3e}")]
    MonotonicityViolation {
        /// Location of the violation.
        x: f64,
        /// Size of the increase.
        increase: f64,
    },

    /// Underlying I/O failure while reading or writing data files.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed CSV input.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for an [`Error::InvalidParameter`] with a formatted reason.
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True when the error signals a modelling-assumption failure rather than
    /// a numerical or I/O problem.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(self, Error::Hypothesis(_))
    }
}
