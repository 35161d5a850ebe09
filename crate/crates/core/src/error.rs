use thiserror::Error;

/// Errors surfaced by the construction and verification routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A size cap was exceeded (dense dimension, qubit count, enumeration range).
    #[error("{what} {requested} exceeds the supported limit {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    /// Operands with incompatible dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    Shape { left: usize, right: usize },

    /// A constructor invariant failed (normalization, unit norm, sign values, ranges).
    #[error("invariant violated: {what} (deviation {deviation:e})")]
    Invariant { what: &'static str, deviation: f64 },

    /// Hermiticity violated: either at construction or as a non-real expectation value.
    #[error("hermiticity violated (deviation {deviation:e})")]
    Hermiticity { deviation: f64 },

    /// Power iteration failed to converge within the iteration budget.
    #[error("eigenvalue iteration did not converge after {iterations} iterations (last estimate {last})")]
    Convergence { last: f64, iterations: usize },

    /// An argument outside the mathematical domain of the operation.
    #[error("domain error: {what}")]
    Domain { what: &'static str },

    /// A verified bound or identity failed to hold.
    #[error("verification failed for {claim}: expected {analytic}, computed {computed}")]
    Verification {
        claim: String,
        analytic: f64,
        computed: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
