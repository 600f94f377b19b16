use crate::error::{check_finite, Result};
use crate::signal::{effective_length, DEFAULT_ENERGY_FRACTION, MIN_SIGNAL_LEN};
use crate::spectral::{MeasurementSource, MeasurementSystem};
use crate::Real;

use super::ista::{ista_solve, IstaConfig};
use super::lattice::finish;
use super::Recovery;

#[derive(Debug, Clone, PartialEq)]
pub struct LassoConfig {
    pub ista: IstaConfig,
    /// Fraction of the folded energy that sets the processing window.
    pub energy_fraction: f64,
    /// Seed for a random ISTA start.
    pub seed: u64,
    pub source: MeasurementSource,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            ista: IstaConfig::default(),
            energy_fraction: DEFAULT_ENERGY_FRACTION,
            seed: 0,
            source: MeasurementSource::Exact,
        }
    }
}

pub(crate) fn window_len<T: Real>(folded: &[T], energy_fraction: f64) -> Result<usize> {
    let ne = effective_length(folded, T::lit(energy_fraction))?;
    Ok(ne.max(MIN_SIGNAL_LEN.min(folded.len())))
}

/// Recovers the residual jumps by LASSO on the out-of-band spectrum of the
/// first 99%-energy window, rounds them to `2λℤ`, integrates and unfolds.
///
/// An ISTA run that hits the iteration cap is reported with `converged = false`.
pub fn lasso_b2r2<T: Real>(folded: &[T], lambda: T, of: f64, cfg: &LassoConfig) -> Result<Recovery<T>> {
    check_finite(folded)?;
    cfg.ista.validate()?;
    let ne = window_len(folded, cfg.energy_fraction)?;
    let system = MeasurementSystem::new(ne, of)?;
    let y = system.measure(&folded[..ne], cfg.source)?;
    let sol = ista_solve(&system, &y, &cfg.ista, cfg.seed)?;
    finish(folded, sol.zhat, lambda, sol.iterations, sol.converged)
}
