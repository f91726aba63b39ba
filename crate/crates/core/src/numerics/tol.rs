//! Numerical tolerances shared by every module.

/// Algebraic identities (unitarity, Hermiticity, reconstruction residuals).
pub const ALGEBRAIC: f64 = 1e-10;

/// Physical-state checks (trace, positivity, completeness).
pub const PHYSICAL: f64 = 1e-9;

/// Probability sums of a random-unitary spec and unit-modulus phases.
pub const PROBABILITY: f64 = 1e-12;

/// Eigenvalues below this are treated as exact zeros in entropies.
pub const EIGEN_CLIP: f64 = 1e-12;

/// Below this success probability a post-selected output is discarded.
pub const MIN_SUCCESS: f64 = 1e-12;
