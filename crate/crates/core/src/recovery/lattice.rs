use crate::error::{check_len, Error, Result};
use crate::Real;

use super::{Recovery, ResidualEstimate};

fn period<T: Real>(lambda: T) -> Result<T> {
    if !lambda.is_finite() || lambda <= T::zero() {
        return Err(Error::param("lambda", format!("must be finite and > 0, got {lambda}")));
    }
    Ok(lambda + lambda)
}

/// Nearest integer multiple of `2λ` index, ties away from zero.
fn level<T: Real>(v: T, period: T) -> i64 {
    (v.as_f64() / period.as_f64()).round() as i64
}

/// `2λ · round(ẑ / 2λ)` entry-wise.
pub fn round_to_lattice<T: Real>(zhat: &[T], lambda: T) -> Result<Vec<T>> {
    let p = period(lambda)?;
    Ok(zhat.iter().map(|&v| T::lit(level(v, p) as f64) * p).collect())
}

/// `f_λ − z`.
pub fn unfold<T: Real>(folded: &[T], z: &[T]) -> Result<Vec<T>> {
    check_len(folded.len(), z.len())?;
    Ok(folded.iter().zip(z).map(|(&y, &r)| y - r).collect())
}

/// Rounds `zhat` (defined on a prefix of `folded`), integrates the integer
/// levels exactly, and unfolds. The residual is taken as zero past the prefix.
pub(crate) fn finish<T: Real>(
    folded: &[T],
    mut zhat: Vec<T>,
    lambda: T,
    iterations_used: usize,
    converged: bool,
) -> Result<Recovery<T>> {
    let p = period(lambda)?;
    zhat.resize(folded.len(), T::zero());
    let levels: Vec<i64> = zhat.iter().map(|&v| level(v, p)).collect();
    let support = levels.iter().enumerate().filter(|(_, &k)| k != 0).map(|(i, _)| i).collect();
    let zhat_rounded = levels.iter().map(|&k| T::lit(k as f64) * p).collect();
    let mut acc = 0i64;
    let z: Vec<T> = levels
        .iter()
        .map(|&k| {
            acc += k;
            T::lit(acc as f64) * p
        })
        .collect();
    let signal = unfold(folded, &z)?;
    Ok(Recovery {
        signal,
        residual: ResidualEstimate { zhat, zhat_rounded, z, support, iterations_used, converged },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_examples() {
        assert_eq!(round_to_lattice(&[0.49 * 0.25, 1.1 * 0.5], 0.25).unwrap(), vec![0.0, 0.5]);
        let exact = [0.0, 0.5, -1.0, 2.5];
        assert_eq!(round_to_lattice(&exact, 0.25).unwrap(), exact);
        // Ties go away from zero.
        assert_eq!(round_to_lattice(&[0.25, -0.25, 0.75], 0.25).unwrap(), vec![0.5, -0.5, 1.0]);
        assert!(round_to_lattice(&[0.1], 0.0).is_err());
    }

    #[test]
    fn unfold_examples() {
        let folded: [f64; 3] = [0.1, -0.2, 0.05];
        assert_eq!(unfold(&folded, &[0.0; 3]).unwrap(), folded);
        let out = unfold(&folded, &[0.0, 0.5, 0.0]).unwrap();
        assert!((out[1] - (-0.7)).abs() < 1e-15);
        assert!(unfold(&folded, &[0.0; 2]).is_err());
    }

    #[test]
    fn unfolding_with_true_residual_restores_samples() {
        let s = crate::signal::generate_bandlimited::<f64>(1, 1024, 6.0, 0.5).unwrap();
        let r = crate::modulo::fold_signal(&s.samples, 0.25).unwrap();
        let out = unfold(&r.folded, r.residual.as_ref().unwrap()).unwrap();
        for (a, b) in out.iter().zip(&s.samples) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn finish_integrates_levels_exactly() {
        let rec = finish(&[0.0; 6], vec![0.51, 0.0, -0.49, 0.02], 0.25, 3, true).unwrap();
        assert_eq!(rec.residual.zhat_rounded, vec![0.5, 0.0, -0.5, 0.0, 0.0, 0.0]);
        assert_eq!(rec.residual.z, vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(rec.residual.support, vec![0, 2]);
        assert_eq!(rec.signal, vec![-0.5, -0.5, 0.0, 0.0, 0.0, 0.0]);
    }
}
