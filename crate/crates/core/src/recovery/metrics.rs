use crate::error::{check_len, Error, Result};
use crate::Real;

/// `‖f − f̄‖² / ‖f‖²`.
pub fn nmse<T: Real>(reference: &[T], estimate: &[T]) -> Result<f64> {
    check_len(reference.len(), estimate.len())?;
    if reference.is_empty() {
        return Err(Error::EmptyInput);
    }
    let energy: f64 = reference.iter().map(|&x| x.as_f64().powi(2)).sum();
    if energy == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let err: f64 = reference
        .iter()
        .zip(estimate)
        .map(|(&a, &b)| (a.as_f64() - b.as_f64()).powi(2))
        .sum();
    Ok(err / energy)
}

/// [`nmse`] in decibels; `-inf` for an exact reconstruction.
pub fn nmse_db<T: Real>(reference: &[T], estimate: &[T]) -> Result<f64> {
    Ok(10.0 * nmse(reference, estimate)?.log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let f = [1.0, -2.0, 0.5, 0.0];
        assert_eq!(nmse(&f, &f).unwrap(), 0.0);
        assert_eq!(nmse_db(&f, &f).unwrap(), f64::NEG_INFINITY);
        let twice: Vec<f64> = f.iter().map(|x| 2.0 * x).collect();
        assert_eq!(nmse(&f, &twice).unwrap(), 1.0);
        let mut bumped = f;
        bumped[2] += 0.5;
        let energy: f64 = f.iter().map(|x| x * x).sum();
        assert!((nmse(&f, &bumped).unwrap() - 0.25 / energy).abs() < 1e-15);
        assert!((nmse_db(&f, &twice).unwrap()).abs() < 1e-12);
        assert!(matches!(nmse(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroSignal)));
        assert!(nmse(&f, &f[..3]).is_err());
    }
}
