use crate::error::{check_finite, Error, Result};
use crate::modulo::{fold_unchecked, first_difference};
use crate::Real;

pub const DEFAULT_HOD_ORDER: usize = 3;
pub const MAX_HOD_ORDER: usize = 8;

/// Higher-order-difference unfolding baseline.
///
/// Takes `order` differences of the folded samples, re-folds them, and
/// integrates the resulting residual difference back `order` times, snapping
/// every partial sum to `2λℤ`. Correct when the `order`-th difference of the
/// true signal stays inside `(−λ, λ)`, which needs a high sampling rate.
pub fn hod_unfold<T: Real>(folded: &[T], lambda: T, order: usize) -> Result<Vec<T>> {
    if !(1..=MAX_HOD_ORDER).contains(&order) {
        return Err(Error::param("order", format!("must lie in 1..={MAX_HOD_ORDER}, got {order}")));
    }
    if !lambda.is_finite() || lambda <= T::zero() {
        return Err(Error::param("lambda", format!("must be finite and > 0, got {lambda}")));
    }
    check_finite(folded)?;
    let mut d = folded.to_vec();
    for _ in 0..order {
        d = first_difference(&d)?;
    }
    let period = 2.0 * lambda.as_f64();
    let snap = |v: f64| (v / period).round();
    // Residual levels in units of 2λ, kept in f64 so high orders cannot overflow.
    let mut e: Vec<f64> = d
        .iter()
        .map(|&v| snap((fold_unchecked(v, lambda) - v).as_f64()))
        .collect();
    for _ in 0..order {
        let mut acc = 0.0;
        for v in e.iter_mut() {
            acc = (acc + *v).round();
            *v = acc;
        }
    }
    Ok(folded.iter().zip(&e).map(|(&y, &k)| y + T::lit(k * period)).collect())
}
