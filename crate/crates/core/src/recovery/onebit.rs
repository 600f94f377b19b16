use crate::error::{check_finite, check_len, Result};
use crate::modulo::dilate_support;
use crate::signal::DEFAULT_ENERGY_FRACTION;
use crate::spectral::{MeasurementSource, MeasurementSystem};
use crate::Real;

use super::lasso::window_len;
use super::lattice::finish;
use super::Recovery;

#[derive(Debug, Clone, PartialEq)]
pub struct OnebitConfig {
    /// Flags are widened by `±dilation` samples before solving.
    pub dilation: usize,
    pub energy_fraction: f64,
    pub source: MeasurementSource,
}

impl Default for OnebitConfig {
    fn default() -> Self {
        Self { dilation: 0, energy_fraction: DEFAULT_ENERGY_FRACTION, source: MeasurementSource::Quantized }
    }
}

/// Least-squares residual amplitudes on the support marked by the folding
/// flags, rounded to `2λℤ`, integrated and unfolded.
///
/// With no flags set the folded samples are returned unchanged.
pub fn ls_onebit<T: Real>(
    folded: &[T],
    flags: &[u8],
    lambda: T,
    of: f64,
    cfg: &OnebitConfig,
) -> Result<Recovery<T>> {
    check_len(folded.len(), flags.len())?;
    check_finite(folded)?;
    let marked = dilate_support(flags, cfg.dilation);
    let support: Vec<usize> = marked.iter().enumerate().filter(|(_, &b)| b != 0).map(|(i, _)| i).collect();
    let Some(&last) = support.last() else {
        return finish(folded, Vec::new(), lambda, 0, true);
    };
    let window = window_len(folded, cfg.energy_fraction)?.max(last + 1);
    let system = MeasurementSystem::new(window, of)?;
    let y = system.measure(&folded[..window], cfg.source)?;
    let amplitudes = system.restricted_pseudoinverse(&support, &y)?;
    let mut zhat = vec![T::zero(); window];
    for (&t, &a) in support.iter().zip(&amplitudes) {
        zhat[t] = a;
    }
    finish(folded, zhat, lambda, 1, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::modulo::{fold_signal, lattice_levels, pack_with_folding_bit};
    use crate::recovery::nmse_db;
    use crate::signal::generate_bandlimited;

    #[test]
    fn no_flags_returns_input() {
        let s = generate_bandlimited::<f64>(1, 512, 4.0, 0.5).unwrap();
        let r = fold_signal(&s.samples, 0.25).unwrap();
        let rec = ls_onebit(&r.folded, &vec![0; 512], 0.25, 4.0, &OnebitConfig::default()).unwrap();
        assert_eq!(rec.signal, r.folded);
        assert!(rec.residual.z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn exact_measurements_with_true_support_recover_exactly() {
        let s = generate_bandlimited::<f64>(7, 1024, 6.0, 0.5).unwrap();
        let r = fold_signal(&s.samples, 0.25).unwrap();
        let flags = r.folding_bits.clone().unwrap();
        let rec = ls_onebit(&r.folded, &flags, 0.25, 6.0, &OnebitConfig::default()).unwrap();
        let truth = lattice_levels(r.residual.as_ref().unwrap(), 0.25).unwrap();
        assert_eq!(lattice_levels(&rec.residual.z, 0.25).unwrap(), truth);
        let dilated = ls_onebit(&r.folded, &flags, 0.25, 6.0, &OnebitConfig { dilation: 1, ..Default::default() }).unwrap();
        assert_eq!(dilated.residual.z, rec.residual.z);
    }

    #[test]
    fn quantized_low_rate_case_beats_folded_samples() {
        let mut scores = Vec::new();
        for seed in 0..10 {
            let s = generate_bandlimited::<f64>(seed, 1024, 3.0, 0.5).unwrap();
            let r = fold_signal(&s.samples, 0.2).unwrap();
            let flags = r.folding_bits.clone().unwrap();
            let (q, b) = pack_with_folding_bit(&r.folded, 0.2, 6, &flags).unwrap();
            let rec = ls_onebit(&q, &b, 0.2, 3.0, &OnebitConfig::default()).unwrap();
            scores.push(nmse_db(&s.samples, &rec.signal).unwrap());
        }
        scores.sort_by(f64::total_cmp);
        assert!(scores[5] < -6.0, "{scores:?}");
    }

    #[test]
    fn too_many_flags_rejected() {
        let folded = vec![0.1; 64];
        assert!(matches!(
            ls_onebit(&folded, &vec![1; 64], 0.25, 4.0, &OnebitConfig::default()),
            Err(Error::SupportTooLarge { .. })
        ));
        assert!(ls_onebit(&folded, &[0; 63], 0.25, 4.0, &OnebitConfig::default()).is_err());
    }
}
