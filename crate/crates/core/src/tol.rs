//! Tolerance ladder used across the crate.
//!
//! All constructions are low-dimensional and well-conditioned, so the
//! thresholds are pinned once here instead of being chosen per call site.

/// Skew-symmetry acceptance for endomorphism matrices.
pub const TOL_SKEW: f64 = 1e-12;

/// Relative singular-value cutoff for numerical ranks and kernels.
pub const TOL_RANK: f64 = 1e-9;

/// Default relative comparison tolerance.
pub const TOL: f64 = 1e-9;

/// Relative acceptance threshold for tau-Jacobi defects (defects are
/// quadratic in tau and are normalized by |tau|^2 before comparison).
pub const TOL_DEFECT: f64 = 1e-8;

/// Default threshold for deciding a torsion component is present.
pub const TOL_TYPE: f64 = 1e-8;
