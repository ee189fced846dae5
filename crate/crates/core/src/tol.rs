//! Absolute tolerances shared across the crate. Every operator in this crate
//! is O(1) in norm, so all comparisons are absolute.

/// Largest `‖M − M†‖_F` accepted as Hermitian.
pub const HERMITIAN: f64 = 1e-10;

/// Eigenvalues in `[-PSD_SLACK, 0)` are treated as zero.
pub const PSD_SLACK: f64 = 1e-10;

/// POVM completeness and trace preservation.
pub const COMPLETENESS: f64 = 1e-10;

/// Trace of a density matrix.
pub const TRACE: f64 = 1e-10;

/// Normalisation of a probability table block.
pub const PROBABILITY_SUM: f64 = 1e-9;

/// Below this a marginal variance counts as zero.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Minimum `tol` accepted by the joint-measurability checker.
pub const JM_MIN_TOL: f64 = 1e-8;

/// Iteration cap for the alternating-projection search.
pub const JM_MAX_ITER: usize = 100_000;
