//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by optimizer runs, controllers, preconditioners and loaders.
#[derive(Debug, Error)]
pub enum Error {
    /// A gradient or iterate picked up a NaN/Inf entry; the run aborts.
    #[error("non-finite {what} at iteration {iter}")]
    NonFinite { what: &'static str, iter: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Division by a zero preconditioner entry. Only reachable with epsilon = 0
    /// and a coordinate never touched by any gradient.
    #[error("preconditioner entry {coordinate} is zero; cannot apply inverse")]
    ZeroPreconditionerEntry { coordinate: usize },

    /// The Polyak numerator f_B(w) - f_B* came out negative beyond rounding noise,
    /// which means the supplied per-component infima f_i* are not true lower bounds.
    #[error("negative Polyak gap {gap:.3e}: batch loss is below the supplied f*; check the f_i* source")]
    NegativeSpsGap { gap: f64 },

    /// A component loss evaluated below its declared infimum.
    #[error("component {index} value is {amount:.3e} below its declared infimum f_i*")]
    ValueBelowInfimum { index: usize, amount: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// LIBSVM parse failure, with the 1-based line number.
    #[error("libsvm parse error on line {line}: {reason}")]
    Libsvm { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
