//! Unfolding algorithms: sparse LASSO recovery of the residual jumps, the
//! one-bit least-squares estimator, and a higher-order-difference baseline.

mod hod;
mod ista;
mod lasso;
mod lattice;
mod metrics;
mod onebit;

pub use hod::{hod_unfold, DEFAULT_HOD_ORDER, MAX_HOD_ORDER};
pub use ista::{ista_solve, lasso_objective, soft_threshold, IstaConfig, IstaInit, IstaSolution};
pub use lasso::{lasso_b2r2, LassoConfig};
pub use lattice::{round_to_lattice, unfold};
pub use metrics::{nmse, nmse_db};
pub use onebit::{ls_onebit, OnebitConfig};

/// Residual diagnostics shared by the sparse recovery paths.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualEstimate<T> {
    /// Unrounded estimate of the residual jumps `ẑ`.
    pub zhat: Vec<T>,
    /// `ẑ` rounded to `2λℤ`.
    pub zhat_rounded: Vec<T>,
    /// Running sum of `zhat_rounded`.
    pub z: Vec<T>,
    /// Indices where `zhat_rounded` is nonzero.
    pub support: Vec<usize>,
    pub iterations_used: usize,
    pub converged: bool,
}

/// Recovered samples plus the residual estimate that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovery<T> {
    pub signal: Vec<T>,
    pub residual: ResidualEstimate<T>,
}
