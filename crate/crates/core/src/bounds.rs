//! Upper bound on the number of residual jumps, jump counting, and the
//! spark-based uniqueness check.

use crate::error::{Error, Result};
use crate::modulo::folding_bits;
use crate::spectral::out_of_band_indices;
use crate::Real;

/// Absorbs rounding in `(peak − λ) / 2λ` when the ratio is an exact integer.
const FLOOR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub of: f64,
    pub lambda: f64,
    pub peak: f64,
    /// `⌊N / (2·OF)⌋`.
    pub k: usize,
    pub l_max: usize,
    pub counted: Option<usize>,
    /// Number of out-of-band measurements.
    pub m: usize,
    /// `L < (M+1)/2` for the counted `L`; `None` without a count.
    pub spark_ok: Option<bool>,
}

impl BoundReport {
    pub fn with_count(mut self, counted: usize) -> Self {
        self.counted = Some(counted);
        self.spark_ok = Some(spark_feasible(counted, self.m));
        self
    }
}

/// `L_max = min(4K + 4K⌊(peak − λ)/(2λ)⌋, N)`, or 0 when `peak < λ`.
pub fn sparsity_bound(n: usize, of: f64, peak: f64, lambda: f64) -> Result<BoundReport> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::param("lambda", format!("must be finite and > 0, got {lambda}")));
    }
    if !peak.is_finite() || peak < 0.0 {
        return Err(Error::param("peak", format!("must be finite and >= 0, got {peak}")));
    }
    let m = out_of_band_indices(n, of)?.len();
    let k = (n as f64 / (2.0 * of)).floor() as usize;
    let l_max = if peak < lambda {
        0
    } else {
        let levels = ((peak - lambda) / (2.0 * lambda) + FLOOR_EPS).floor() as usize;
        (4 * k).saturating_mul(levels + 1).min(n)
    };
    Ok(BoundReport { n, of, lambda, peak, k, l_max, counted: None, m, spark_ok: None })
}

/// Number of indices where the residual changes level (`z(−1) = 0`).
pub fn count_jumps<T: Real>(z: &[T], lambda: T) -> Result<usize> {
    Ok(folding_bits(z, lambda, 0)?.iter().filter(|&&b| b != 0).count())
}

/// `L < (M+1)/2`.
pub fn spark_feasible(l: usize, m: usize) -> bool {
    2 * l < m + 1
}

/// One report per `(λ, OF)` pair, λ-major.
pub fn bound_table(n: usize, lambdas: &[f64], ofs: &[f64], peak: f64) -> Result<Vec<BoundReport>> {
    let mut rows = Vec::with_capacity(lambdas.len() * ofs.len());
    for &lambda in lambdas {
        for &of in ofs {
            rows.push(sparsity_bound(n, of, peak, lambda)?);
        }
    }
    Ok(rows)
}
