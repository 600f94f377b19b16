//! Bandlimited test-signal synthesis and effective-length selection.
//!
//! Signals are built in the DFT domain: the in-band bins are filled with seeded
//! standard-normal coefficients (Hermitian-symmetric so the time signal is real),
//! every out-of-band bin is exactly zero, and the inverse transform is shaped by a
//! Hann envelope that concentrates the energy around `N/2`. The result is
//! peak-normalized to 1.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{check_finite, Error, Result};
use crate::Real;

/// Fraction of the folded-sample energy that the effective length must cover.
pub const DEFAULT_ENERGY_FRACTION: f64 = 0.99;

/// Smallest accepted signal length.
pub const MIN_SIGNAL_LEN: usize = 8;

/// A real sample sequence with its sampling metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal<T> {
    pub samples: Vec<T>,
    pub oversampling_factor: T,
    /// Normalized in-band half-width, `1 / OF`.
    pub rho: T,
    /// `max |samples|`.
    pub peak: T,
    /// Sum of squared samples.
    pub energy: T,
    /// Generator seed, when the signal came from [`generate_bandlimited`].
    pub seed: Option<u64>,
}

impl<T: Real> SampledSignal<T> {
    /// Wraps raw samples, computing `rho`, `peak` and `energy`.
    pub fn new(samples: Vec<T>, oversampling_factor: T) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_finite(&samples)?;
        check_oversampling(oversampling_factor)?;
        let peak = peak_magnitude(&samples);
        let energy = samples.iter().map(|&x| x * x).sum();
        Ok(Self {
            samples,
            oversampling_factor,
            rho: T::one() / oversampling_factor,
            peak,
            energy,
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn check_oversampling<T: Real>(of: T) -> Result<()> {
    if !of.is_finite() || of <= T::one() {
        return Err(Error::param("OF", format!("oversampling factor must be finite and > 1, got {of}")));
    }
    Ok(())
}

pub(crate) fn peak_magnitude<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |m, &x| m.max(num_traits::Float::abs(x)))
}

/// Number of DFT bins (per side, excluding DC) inside `[0, ρπ]`: `⌊N / (2·OF)⌋`.
pub fn in_band_half_width<T: Real>(n: usize, of: T) -> usize {
    let half = T::of_usize(n) / (T::lit(2.0) * of);
    num_traits::Float::floor(half).as_f64().max(0.0) as usize
}

/// Guard bins left empty just inside the band edge: the Hann envelope's
/// main-lobe half-width, `⌈2 / width⌉`, capped at half the band.
pub fn envelope_guard_bins<T: Real>(n: usize, of: T, envelope_width: T) -> usize {
    let lobe = num_traits::Float::ceil(T::lit(2.0) / envelope_width).as_f64() as usize;
    lobe.min(in_band_half_width(n, of) / 2)
}

/// Real periodic carrier whose length-`N` DFT is supported on `|k| <= K - guard`,
/// where `K = ⌊N / (2·OF)⌋`. All other bins are exactly zero.
pub fn bandlimited_carrier<T: Real>(seed: u64, n: usize, of: T, guard: usize) -> Result<Vec<T>> {
    if n < MIN_SIGNAL_LEN {
        return Err(Error::param("N", format!("need N >= {MIN_SIGNAL_LEN}, got {n}")));
    }
    check_oversampling(of)?;
    let k_max = in_band_half_width(n, of).saturating_sub(guard);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || T::lit(StandardNormal.sample(&mut rng));

    let mut spectrum = vec![Complex::new(T::zero(), T::zero()); n];
    spectrum[0] = Complex::new(draw(), T::zero());
    // k_max < N/2 always holds for OF > 1, so k and N-k never coincide.
    for k in 1..=k_max {
        let c = Complex::new(draw(), draw());
        spectrum[k] = c;
        spectrum[n - k] = c.conj();
    }

    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);
    let scale = T::one() / T::of_usize(n);
    Ok(spectrum.iter().map(|c| c.re * scale).collect())
}

/// Raised-cosine window of relative width `width`, centered at `N/2` and zero outside.
pub fn hann_envelope<T: Real>(n: usize, width: T) -> Result<Vec<T>> {
    check_width(width)?;
    let span = width * T::of_usize(n);
    let center = T::of_usize(n) / T::lit(2.0);
    let half = T::lit(0.5);
    let two_pi = T::TAU();
    Ok((0..n)
        .map(|i| {
            let t = (T::of_usize(i) - center) / span;
            if num_traits::Float::abs(t) < half {
                half * (T::one() + (two_pi * t).cos())
            } else {
                T::zero()
            }
        })
        .collect())
}

fn check_width<T: Real>(width: T) -> Result<()> {
    if !(width > T::zero() && width <= T::one()) {
        return Err(Error::param("envelope_width", format!("must lie in (0, 1], got {width}")));
    }
    Ok(())
}

/// Synthesizes a peak-normalized, envelope-concentrated bandlimited signal.
///
/// Deterministic for a fixed `(seed, n, of, envelope_width)`.
pub fn generate_bandlimited<T: Real>(
    seed: u64,
    n: usize,
    of: T,
    envelope_width: T,
) -> Result<SampledSignal<T>> {
    check_width(envelope_width)?;
    let guard = envelope_guard_bins(n, of, envelope_width);
    let carrier = bandlimited_carrier(seed, n, of, guard)?;
    let envelope = hann_envelope(n, envelope_width)?;
    let shaped: Vec<T> = carrier.iter().zip(&envelope).map(|(&c, &w)| c * w).collect();
    let signal = SampledSignal::new(shaped, of)?;
    Ok(normalize_peak(signal)?.with_seed(seed))
}

/// Scales the samples so that `max |x| = 1`.
pub fn normalize_peak<T: Real>(signal: SampledSignal<T>) -> Result<SampledSignal<T>> {
    let peak = peak_magnitude(&signal.samples);
    if peak == T::zero() {
        return Err(Error::ZeroSignal);
    }
    let samples: Vec<T> = signal.samples.iter().map(|&x| x / peak).collect();
    let energy = samples.iter().map(|&x| x * x).sum();
    Ok(SampledSignal {
        samples,
        // x / peak at the argmax is exactly ±1 in IEEE arithmetic.
        peak: T::one(),
        energy,
        ..signal
    })
}

/// Smallest prefix length whose energy reaches `energy_fraction` of the total.
pub fn effective_length<T: Real>(folded: &[T], energy_fraction: T) -> Result<usize> {
    if folded.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(energy_fraction > T::zero() && energy_fraction < T::one()) {
        return Err(Error::param("energy_fraction", format!("must lie in (0, 1), got {energy_fraction}")));
    }
    let total: T = folded.iter().map(|&x| x * x).sum();
    if !total.is_finite() {
        check_finite(folded)?;
    }
    if total == T::zero() {
        return Err(Error::ZeroSignal);
    }
    let target = energy_fraction * total;
    let mut acc = T::zero();
    for (i, &x) in folded.iter().enumerate() {
        acc = acc + x * x;
        if acc >= target {
            return Ok(i + 1);
        }
    }
    Ok(folded.len())
}
