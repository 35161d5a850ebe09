//! Numerical toolkit for Mermin-Klyshko (MK) Bell operators and their
//! variance-augmented variants V_n = M_n + M_n^2 on n-qubit systems.
//!
//! The crate builds the MK operator recursively from per-site measurement
//! settings, produces the canonical settings under which it collapses to a
//! rank-2 corner form, and independently verifies three bounds on <V_n>:
//!
//! - separability: <V_n> <= 2^(n-1) over product (hence separable) states,
//!   checked by a closed form plus derivative-free multi-start optimization;
//! - maximal quantum value: <V_n> <= 2^((n-1)/2) + 2^(n-1), checked by the
//!   analytic rank-2 eigenstructure plus power iteration, and attained by the
//!   GHZ state;
//! - local realism: <V_n> <= 2 under any local-hidden-variable model, checked
//!   by exhaustive enumeration of deterministic strategies and convexity over
//!   distributions.
//!
//! The gap between the last two classical-side bounds grows as 2^(n-2), so for
//! n > 2 every computational-basis product state already violates the
//! local-realism bound. All routines are pure functions over immutable values
//! with explicit seeds; identical inputs give identical outputs.

pub mod bounds;
pub mod error;
pub mod lhv;
pub mod linalg;
pub mod operators;
pub mod states;

pub use error::{Error, Result};

/// Tolerance for constructor-checked invariants (normalization, Hermiticity,
/// unit vectors, distribution weights).
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Tolerance for numeric equality of matrices, expectation residues, and
/// closed-form versus dense-oracle agreement.
pub const EQUALITY_TOL: f64 = 1e-10;

/// Default tolerance for the power-iteration eigenvalue estimate.
pub const EIGEN_TOL: f64 = 1e-9;

/// Tolerance for the exact mean/variance decomposition identity.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Dense linear algebra is capped at 2^10 = 1024 dimensions (10 qubits).
pub const DENSE_CAP_QUBITS: usize = 10;

/// Exhaustive LHV enumeration is capped at 4^12 deterministic assignments.
pub const LHV_ENUM_CAP_QUBITS: usize = 12;

/// 2^(n-1) as an exact f64 (n >= 1).
pub(crate) fn pow2(exp: usize) -> f64 {
    (1u64 << exp) as f64
}

/// 2^((n-1)/2) computed exactly for odd n-1 as 2^k * sqrt(2), so that the
/// same bit pattern is shared by every route that quotes this value.
pub(crate) fn pow2_half(n: usize) -> f64 {
    let k = (n - 1) / 2;
    if (n - 1).is_multiple_of(2) {
        pow2(k)
    } else {
        pow2(k) * std::f64::consts::SQRT_2
    }
}
