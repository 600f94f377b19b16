//! Centered modulo folding, residual bookkeeping, uniform quantization and the
//! one-bit folding-flag encoder.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_finite, check_len, Error, Result};
use crate::Real;

/// Tolerance (in units of 2λ) for accepting a value as a lattice point.
pub const LATTICE_TOLERANCE: f64 = 1e-9;

/// Slack allowed above `+λ` before [`quantize`] rejects a sample.
pub const QUANTIZER_RANGE_SLACK: f64 = 1e-12;

/// Largest supported quantizer resolution.
pub const MAX_BITS: u32 = 30;

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if !lambda.is_finite() || lambda <= T::zero() {
        return Err(Error::param("lambda", format!("must be finite and > 0, got {lambda}")));
    }
    Ok(())
}

/// `((x + λ) mod 2λ) − λ`, with the mod taken in `[0, 2λ)`; the output lies in `[−λ, λ)`.
pub fn fold_scalar<T: Real>(x: T, lambda: T) -> Result<T> {
    check_lambda(lambda)?;
    if !x.is_finite() {
        return Err(Error::NonFinite(0));
    }
    Ok(fold_unchecked(x, lambda))
}

#[inline]
pub(crate) fn fold_unchecked<T: Real>(x: T, lambda: T) -> T {
    if x >= -lambda && x < lambda {
        return x;
    }
    let period = lambda + lambda;
    // fmod is exact; only the shift by λ rounds.
    let mut r = (x + lambda) % period;
    if r < T::zero() {
        r = r + period;
    }
    if r >= period {
        r = r - period;
    }
    let y = r - lambda;
    if y >= lambda {
        -lambda
    } else {
        y
    }
}

/// Folded samples together with the acquisition metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedRecord<T> {
    /// `f_λ(n)`, possibly quantized.
    pub folded: Vec<T>,
    pub lambda: T,
    /// Quantizer resolution of `folded`; `None` when unquantized.
    pub bits: Option<u32>,
    /// `b(n)`: 1 where the residual changes level.
    pub folding_bits: Option<Vec<u8>>,
    /// `z(n) = f_λ(n) − f(n)`, known only for simulated acquisitions.
    pub residual: Option<Vec<T>>,
}

impl<T: Real> FoldedRecord<T> {
    pub fn len(&self) -> usize {
        self.folded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folded.is_empty()
    }
}

/// Folds every sample and records the residual and its folding-bit stream.
pub fn fold_signal<T: Real>(samples: &[T], lambda: T) -> Result<FoldedRecord<T>> {
    check_lambda(lambda)?;
    check_finite(samples)?;
    let folded: Vec<T> = samples.iter().map(|&x| fold_unchecked(x, lambda)).collect();
    let residual: Vec<T> = folded.iter().zip(samples).map(|(&y, &x)| y - x).collect();
    let bits = folding_bits(&residual, lambda, 0)?;
    Ok(FoldedRecord {
        folded,
        lambda,
        bits: None,
        folding_bits: Some(bits),
        residual: Some(residual),
    })
}

/// Integer level `z(n) / 2λ` of each residual sample; errors on off-lattice values.
pub fn lattice_levels<T: Real>(z: &[T], lambda: T) -> Result<Vec<i64>> {
    check_lambda(lambda)?;
    let period = (lambda + lambda).as_f64();
    z.iter()
        .enumerate()
        .map(|(i, &v)| {
            let q = v.as_f64() / period;
            let k = q.round();
            if !q.is_finite() || (q - k).abs() > LATTICE_TOLERANCE {
                Err(Error::OffLattice { index: i, value: v.as_f64() })
            } else {
                Ok(k as i64)
            }
        })
        .collect()
}

/// `b(n) = 1` iff `z(n) ≠ z(n−1)` (with `z(−1) = 0`), widened by `±dilation` samples.
pub fn folding_bits<T: Real>(z: &[T], lambda: T, dilation: usize) -> Result<Vec<u8>> {
    let levels = lattice_levels(z, lambda)?;
    let mut prev = 0i64;
    let raw: Vec<u8> = levels
        .iter()
        .map(|&k| {
            let b = u8::from(k != prev);
            prev = k;
            b
        })
        .collect();
    Ok(dilate_support(&raw, dilation))
}

/// Sets every index within `±dilation` of a flagged index.
pub fn dilate_support(bits: &[u8], dilation: usize) -> Vec<u8> {
    if dilation == 0 {
        return bits.iter().map(|&b| u8::from(b != 0)).collect();
    }
    let n = bits.len();
    let mut out = vec![0u8; n];
    for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b != 0) {
        let lo = i.saturating_sub(dilation);
        let hi = (i + dilation).min(n - 1);
        out[lo..=hi].iter_mut().for_each(|o| *o = 1);
    }
    out
}

/// `out[0] = x[0]`, `out[n] = x[n] − x[n−1]` (the sequence is prepended with a zero).
pub fn first_difference<T: Real>(x: &[T]) -> Result<Vec<T>> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut prev = T::zero();
    Ok(x.iter()
        .map(|&v| {
            let d = v - prev;
            prev = v;
            d
        })
        .collect())
}

/// Running sum; the inverse of [`first_difference`].
pub fn cumulative_sum<T: Real>(x: &[T]) -> Vec<T> {
    let mut acc = T::zero();
    x.iter()
        .map(|&v| {
            acc = acc + v;
            acc
        })
        .collect()
}

/// Uniform `B`-bit quantizer over `[−λ, λ]` with step `Δ_B = 2λ / 2^B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerSpec<T> {
    pub lambda: T,
    pub bits: u32,
    pub step: T,
}

impl<T: Real> QuantizerSpec<T> {
    pub fn new(lambda: T, bits: u32) -> Result<Self> {
        check_lambda(lambda)?;
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::param("bits", format!("must lie in 1..={MAX_BITS}, got {bits}")));
        }
        let levels = T::lit((1u64 << bits) as f64);
        Ok(Self { lambda, bits, step: (lambda + lambda) / levels })
    }

    pub fn levels(&self) -> u32 {
        1u32 << self.bits
    }

    /// Mid-rise code of one sample: `clamp(⌊(x + λ)/Δ⌋, 0, 2^B − 1)`.
    fn code(&self, x: T) -> u32 {
        let c = num_traits::Float::floor((x + self.lambda) / self.step).as_f64();
        c.clamp(0.0, f64::from(self.levels() - 1)) as u32
    }

    /// Reconstruction level of a code: `−λ + (code + ½)Δ`.
    pub fn level(&self, code: u32) -> T {
        -self.lambda + (T::lit(f64::from(code)) + T::lit(0.5)) * self.step
    }

    fn check_range(&self, xs: &[T]) -> Result<()> {
        check_finite(xs)?;
        let limit = self.lambda + T::lit(QUANTIZER_RANGE_SLACK);
        match xs.iter().position(|&x| num_traits::Float::abs(x) > limit) {
            Some(index) => Err(Error::OutOfRange {
                index,
                value: xs[index].as_f64(),
                lambda: self.lambda.as_f64(),
            }),
            None => Ok(()),
        }
    }
}

/// Quantizer codes for each sample (range-checked like [`quantize`]).
pub fn quantize_codes<T: Real>(x: &[T], spec: &QuantizerSpec<T>) -> Result<Vec<u32>> {
    spec.check_range(x)?;
    Ok(x.iter().map(|&v| spec.code(v)).collect())
}

/// Mid-rise uniform quantization. Inputs must already be folded into `[−λ, λ]`.
pub fn quantize<T: Real>(x: &[T], spec: &QuantizerSpec<T>) -> Result<Vec<T>> {
    Ok(quantize_codes(x, spec)?.into_iter().map(|c| spec.level(c)).collect())
}

/// Clamps to `[−λ, λ]` first, like a saturating ADC front end, then quantizes.
pub fn quantize_saturating<T: Real>(x: &[T], spec: &QuantizerSpec<T>) -> Result<Vec<T>> {
    let clamped: Vec<T> = x.iter().map(|&v| v.max(-spec.lambda).min(spec.lambda)).collect();
    quantize(&clamped, spec)
}

/// Splits a `B`-bit word budget into `B−1` sample bits plus the folding flag.
///
/// Returns the samples quantized at `B−1` bits and the flag stream unchanged.
pub fn pack_with_folding_bit<T: Real>(
    folded: &[T],
    lambda: T,
    bits: u32,
    flags: &[u8],
) -> Result<(Vec<T>, Vec<u8>)> {
    if bits < 2 {
        return Err(Error::param("bits", format!("need at least 2 bits to reserve a flag, got {bits}")));
    }
    check_len(folded.len(), flags.len())?;
    let spec = QuantizerSpec::new(lambda, bits - 1)?;
    let quantized = quantize(folded, &spec)?;
    Ok((quantized, flags.iter().map(|&b| u8::from(b != 0)).collect()))
}

/// Packs samples and flags into ADC words: bits `B−1..1` carry the sample code, bit 0 the flag.
pub fn pack_words<T: Real>(folded: &[T], lambda: T, bits: u32, flags: &[u8]) -> Result<Vec<u32>> {
    if bits < 2 {
        return Err(Error::param("bits", format!("need at least 2 bits to reserve a flag, got {bits}")));
    }
    check_len(folded.len(), flags.len())?;
    let spec = QuantizerSpec::new(lambda, bits - 1)?;
    let codes = quantize_codes(folded, &spec)?;
    Ok(codes
        .into_iter()
        .zip(flags)
        .map(|(c, &b)| (c << 1) | u32::from(b != 0))
        .collect())
}

/// Inverse of [`pack_words`]: reconstruction levels at `B−1` bits and the flag stream.
pub fn unpack_words<T: Real>(words: &[u32], lambda: T, bits: u32) -> Result<(Vec<T>, Vec<u8>)> {
    if bits < 2 {
        return Err(Error::param("bits", format!("need at least 2 bits to reserve a flag, got {bits}")));
    }
    let spec = QuantizerSpec::new(lambda, bits - 1)?;
    let max = (1u32 << bits) - 1;
    if let Some(i) = words.iter().position(|&w| w > max) {
        return Err(Error::param("words", format!("word {} at index {i} exceeds {bits} bits", words[i])));
    }
    Ok(words
        .iter()
        .map(|&w| (spec.level(w >> 1), (w & 1) as u8))
        .unzip())
}

/// Adds i.i.d. zero-mean Gaussian noise at `snr_db` relative to the mean power of
/// `folded`. `f64::INFINITY` means noiseless. The result is not re-folded.
pub fn add_noise<T: Real>(folded: &[T], snr_db: f64, seed: u64) -> Result<Vec<T>> {
    if folded.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_finite(folded)?;
    if snr_db == f64::INFINITY {
        return Ok(folded.to_vec());
    }
    if !snr_db.is_finite() {
        return Err(Error::param("snr_db", format!("must be finite or +inf, got {snr_db}")));
    }
    let power = folded.iter().map(|&x| x.as_f64().powi(2)).sum::<f64>() / folded.len() as f64;
    let sigma = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(folded
        .iter()
        .map(|&x| {
            let w: f64 = StandardNormal.sample(&mut rng);
            x + T::lit(sigma * w)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fold_scalar_examples() {
        assert_eq!(fold_scalar(0.1, 0.25).unwrap(), 0.1);
        assert!((fold_scalar(0.3f64, 0.25).unwrap() + 0.2).abs() < 1e-12);
        assert_eq!(fold_scalar(0.25, 0.25).unwrap(), -0.25);
        assert_eq!(fold_scalar(-0.25, 0.25).unwrap(), -0.25);
        assert!(fold_scalar(1.0, 0.0).is_err());
        assert!(fold_scalar(1.0, -1.0).is_err());
        assert!(fold_scalar(f64::NAN, 0.25).is_err());
        assert!(fold_scalar(f64::INFINITY, 0.25).is_err());
    }

    #[test]
    fn folding_small_signal_is_identity() {
        let x = [0.0, 0.1, -0.2, 0.24];
        let r = fold_signal(&x, 0.25).unwrap();
        assert_eq!(r.folded, x);
        assert!(r.residual.unwrap().iter().all(|&z| z == 0.0));
        assert!(r.folding_bits.unwrap().iter().all(|&b| b == 0));
    }

    #[test]
    fn fold_signal_residual_is_on_lattice_and_bits_match_jumps() {
        let s = crate::signal::generate_bandlimited::<f64>(2, 1024, 6.0, 0.5).unwrap();
        let r = fold_signal(&s.samples, 0.25).unwrap();
        let z = r.residual.as_ref().unwrap();
        let levels = lattice_levels(z, 0.25).unwrap();
        assert!(levels.iter().any(|&k| k != 0));
        for (i, (&y, &x)) in r.folded.iter().zip(&s.samples).enumerate() {
            assert!((-0.25..0.25).contains(&y));
            assert!((y - x - z[i]).abs() < 1e-15);
        }
        let dz = first_difference(z).unwrap();
        let bits = r.folding_bits.unwrap();
        for (i, &b) in bits.iter().enumerate() {
            assert_eq!(b == 1, dz[i].abs() > 1e-9, "index {i}");
        }
        // Refolding the folded samples changes nothing.
        let again = fold_signal(&r.folded, 0.25).unwrap();
        assert_eq!(again.folded, r.folded);
    }

    #[test]
    fn dilation_widens_flags() {
        assert_eq!(dilate_support(&[0, 0, 1, 0, 0, 0, 1], 1), vec![0, 1, 1, 1, 0, 1, 1]);
        assert_eq!(dilate_support(&[1, 0, 0], 0), vec![1, 0, 0]);
        assert_eq!(dilate_support(&[1, 0, 0, 0], 2), vec![1, 1, 1, 0]);
    }

    #[test]
    fn lattice_levels_rejects_off_lattice() {
        assert_eq!(lattice_levels(&[0.0, 0.5, -1.0], 0.25).unwrap(), vec![0, 1, -2]);
        assert!(matches!(lattice_levels(&[0.0, 0.3], 0.25), Err(Error::OffLattice { index: 1, .. })));
    }

    #[test]
    fn first_difference_examples() {
        assert_eq!(first_difference(&[1.0, 1.0, 3.0]).unwrap(), vec![1.0, 0.0, 2.0]);
        assert!(matches!(first_difference::<f64>(&[]), Err(Error::EmptyInput)));
        let x = [3.0, -1.0, 4.0, 1.0, -5.0, 9.0];
        assert_eq!(cumulative_sum(&first_difference(&x).unwrap()), x);
    }

    #[test]
    fn quantizer_examples() {
        let spec = QuantizerSpec::new(0.25, 3).unwrap();
        assert_eq!(spec.step * 8.0, 0.5);
        let center = -0.25 + spec.step / 2.0;
        assert_eq!(quantize(&[center], &spec).unwrap(), vec![center]);

        let one_bit = QuantizerSpec::new(0.25, 1).unwrap();
        let out = quantize(&[-0.25, -0.1, 0.0, 0.1, 0.2499, 0.25], &one_bit).unwrap();
        assert_eq!(out, vec![-0.125, -0.125, 0.125, 0.125, 0.125, 0.125]);

        assert!(matches!(quantize(&[0.3], &spec), Err(Error::OutOfRange { .. })));
        assert!(QuantizerSpec::new(0.25, 0).is_err());
        assert!(QuantizerSpec::<f64>::new(0.0, 4).is_err());
    }

    #[test]
    fn quantizer_error_bound_on_dense_grid() {
        for bits in 1..=10 {
            let spec = QuantizerSpec::new(0.25, bits).unwrap();
            let grid: Vec<f64> = (0..20_000).map(|i| -0.25 + 0.5 * i as f64 / 20_000.0).collect();
            let q = quantize(&grid, &spec).unwrap();
            let worst = grid.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst <= spec.step / 2.0 + 1e-15, "B={bits}: {worst}");
        }
    }

    #[test]
    fn saturating_quantizer_clamps_noise_excursions() {
        let spec = QuantizerSpec::new(0.25, 4).unwrap();
        let q = quantize_saturating(&[0.4, -0.3], &spec).unwrap();
        assert_eq!(q, vec![spec.level(15), spec.level(0)]);
    }

    #[test]
    fn bit_budget_split() {
        let s = crate::signal::generate_bandlimited::<f64>(9, 512, 3.0, 0.5).unwrap();
        let r = fold_signal(&s.samples, 0.2).unwrap();
        let flags = r.folding_bits.clone().unwrap();
        let (q, lsb) = pack_with_folding_bit(&r.folded, 0.2, 6, &flags).unwrap();
        assert_eq!(lsb, flags);
        let five = QuantizerSpec::new(0.2, 5).unwrap();
        let six = QuantizerSpec::new(0.2, 6).unwrap();
        assert_eq!(five.step, 2.0 * six.step);
        let worst = r.folded.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst <= six.step + 1e-15);

        let zeros = vec![0u8; r.len()];
        assert!(pack_with_folding_bit(&r.folded, 0.2, 6, &zeros).unwrap().1.iter().all(|&b| b == 0));
        assert!(pack_with_folding_bit(&r.folded, 0.2, 1, &zeros).is_err());
        assert!(pack_with_folding_bit(&r.folded, 0.2, 6, &zeros[1..]).is_err());
    }

    #[test]
    fn word_packing_places_flag_in_lsb() {
        let spec = QuantizerSpec::new(0.25, 7).unwrap();
        let x = [-0.25, 0.0, 0.2499];
        let words = pack_words(&x, 0.25, 8, &[1, 0, 1]).unwrap();
        assert_eq!(words[0], 1);
        assert_eq!(words[1] & 1, 0);
        assert_eq!(words[2], (127 << 1) | 1);
        let (levels, flags) = unpack_words(&words, 0.25, 8).unwrap();
        assert_eq!(flags, vec![1, 0, 1]);
        assert_eq!(levels, quantize(&x, &spec).unwrap());
        assert!(unpack_words::<f64>(&[256], 0.25, 8).is_err());
    }

    #[test]
    fn noise_examples() {
        let s = crate::signal::generate_bandlimited::<f64>(4, 1024, 6.0, 0.5).unwrap();
        let r = fold_signal(&s.samples, 0.25).unwrap();
        assert_eq!(add_noise(&r.folded, f64::INFINITY, 1).unwrap(), r.folded);
        assert!(add_noise(&r.folded, f64::NAN, 1).is_err());
        assert!(add_noise::<f64>(&[], 10.0, 1).is_err());

        let a = add_noise(&r.folded, 10.0, 5).unwrap();
        let b = add_noise(&r.folded, 10.0, 5).unwrap();
        assert_eq!(a, b);

        let p_sig = r.folded.iter().map(|x| x * x).sum::<f64>() / 1024.0;
        let p_noise = a.iter().zip(&r.folded).map(|(y, x)| (y - x).powi(2)).sum::<f64>() / 1024.0;
        let snr = 10.0 * (p_sig / p_noise).log10();
        assert!((snr - 10.0).abs() < 0.5, "measured {snr}");
    }

    proptest! {
        #[test]
        fn fold_lattice_idempotence_periodicity(x in -50.0f64..50.0, lambda in 0.01f64..2.0, k in -10i32..=10) {
            let y = fold_scalar(x, lambda).unwrap();
            prop_assert!(y >= -lambda && y < lambda);
            let q = (y - x) / (2.0 * lambda);
            prop_assert!((q - q.round()).abs() < 1e-9);
            prop_assert_eq!(fold_scalar(y, lambda).unwrap(), y);
            let shifted = fold_scalar(x + 2.0 * lambda * f64::from(k), lambda).unwrap();
            // Equal up to rounding, or on opposite sides of the ±λ seam.
            let d = (shifted - y).abs();
            prop_assert!(d < 1e-9 || (d - 2.0 * lambda).abs() < 1e-9);
        }

        #[test]
        fn quantizer_is_monotone(a in -0.25f64..0.25, b in -0.25f64..0.25, bits in 1u32..12) {
            let spec = QuantizerSpec::new(0.25, bits).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let q = quantize(&[lo, hi], &spec).unwrap();
            prop_assert!(q[0] <= q[1]);
        }
    }
}
