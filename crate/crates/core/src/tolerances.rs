//! Numerical thresholds shared across the crate.
//!
//! Every gate used by a certifier or constructor is named here so that the
//! numbers appear exactly once.

/// Maximum entrywise asymmetry, relative to the largest entry, for a matrix
/// to be treated as Hermitian and symmetrized.
pub const HERMITIAN_REL: f64 = 1e-10;

/// Smallest eigenvalue allowed for a positive semidefinite operator.
pub const PSD_ABS: f64 = 1e-10;

/// Allowed deviation of a density matrix trace from one.
pub const TRACE_ABS: f64 = 1e-10;

/// Completeness residual `‖Σ A_j†A_j − 1‖` accepted for a measurement.
pub const COMPLETENESS: f64 = 1e-9;

/// Orthonormality residual accepted for a basis.
pub const ORTHONORMAL: f64 = 1e-9;

/// Relative singular-value cutoff used to decide whether an operator is rank one.
pub const RANK_ONE_REL: f64 = 1e-9;

/// Eigenvalues below this (after scaling to unit trace) contribute nothing to
/// `−Σ λ ln λ`.
pub const ENTROPY_CLIP: f64 = 1e-12;

/// Eigenvalue cutoff for the numerical rank used by purification.
pub const PURIFY_RANK: f64 = 1e-12;

/// Smallest eigenvalue accepted as positive definite by the ingredient checks.
pub const PD_MIN: f64 = 1e-10;

/// Default gate on theorem slacks (absolute).
pub const THEOREM: f64 = 1e-8;

/// Gate on ingredient gaps: absolute for entropy-like scalars, scaled by
/// `max(1, |rhs|)` for trace quantities.
pub const INGREDIENT: f64 = 1e-8;

/// Gate on individual inequality links of a replayed proof chain.
pub const CHAIN_LINK: f64 = 1e-7;

/// Gate on exact identities evaluated inside a replayed proof chain.
pub const CHAIN_IDENTITY: f64 = 1e-9;

/// Gate on the purification reduction of the three-space theorem.
pub const PURIFICATION: f64 = 1e-7;

/// Gate on the minimum concavity gap.
pub const CONCAVITY: f64 = 1e-9;

/// Regularization weight mixed in with the maximally mixed state when a
/// proof replay needs positive definite marginals.
pub const REGULARIZATION_DELTA: f64 = 1e-10;

/// Smallest eigenvalue accepted for operators whose logarithm a proof replay
/// takes. Regularization with [`REGULARIZATION_DELTA`] keeps marginals well
/// above this.
pub const REPLAY_PD_FLOOR: f64 = 1e-14;

/// Sample points at which the resolvent identities of a proof replay are
/// checked pointwise.
pub const REPLAY_SAMPLE_TIMES: [f64; 3] = [0.1, 1.0, 10.0];

/// Trace deviation accepted for an explicit state written in a scenario file.
/// Accepted matrices are divided by their trace before validation.
pub const SCENARIO_TRACE: f64 = 1e-8;
