//! Out-of-band measurement system: the index set `U_N` and the implicit
//! partial-DFT operator `V` (`V[k, n] = e^{−j2πkn/N}`, `k ∈ U_N`).

use std::fmt;
use std::sync::{Arc, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_finite, check_len, Error, Result};
use crate::linalg;
use crate::modulo::first_difference;
use crate::Real;

/// Restricted Gram systems above this condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// `{k : ρπ < 2πk/N < 2π − ρπ}` with `ρ = 1/OF`, i.e. `min(k, N−k) > N/(2·OF)`.
pub fn out_of_band_indices(n: usize, of: f64) -> Result<Vec<usize>> {
    if n < 4 {
        return Err(Error::param("N", format!("must be at least 4, got {n}")));
    }
    if !of.is_finite() || of <= 1.0 {
        return Err(Error::param("OF", format!("must be finite and > 1, got {of}")));
    }
    let indices: Vec<usize> = (1..n)
        .filter(|&k| {
            let edge = k.min(n - k) as f64;
            2.0 * of * edge > n as f64
        })
        .collect();
    if indices.is_empty() {
        return Err(Error::NoMeasurements { n, of });
    }
    Ok(indices)
}

/// How a measurement vector was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementSource {
    Exact,
    Quantized,
    Noisy,
}

/// Out-of-band DFT coefficients, ordered like [`MeasurementSystem::indices`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementVector<T> {
    pub values: Vec<Complex<T>>,
    pub source: MeasurementSource,
}

impl<T: Real> MeasurementVector<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm_sq(&self) -> T {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Scratch buffers for repeated operator applications.
pub struct OperatorWorkspace<T> {
    buffer: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

/// Immutable after construction; every method takes `&self`.
pub struct MeasurementSystem<T: Real> {
    n: usize,
    of: f64,
    indices: Vec<usize>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    gram_kernel: OnceLock<Vec<T>>,
}

impl<T: Real> fmt::Debug for MeasurementSystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasurementSystem")
            .field("n", &self.n)
            .field("of", &self.of)
            .field("m", &self.indices.len())
            .finish()
    }
}

impl<T: Real> MeasurementSystem<T> {
    pub fn new(n: usize, of: f64) -> Result<Self> {
        let indices = out_of_band_indices(n, of)?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            of,
            indices,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            gram_kernel: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.indices.len()
    }

    pub fn oversampling_factor(&self) -> f64 {
        self.of
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// `‖V‖₂² = N`: the rows of a DFT matrix are orthogonal with norm² `N`.
    pub fn operator_norm_sq(&self) -> T {
        T::of_usize(self.n)
    }

    pub fn workspace(&self) -> OperatorWorkspace<T> {
        let scratch_len = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        OperatorWorkspace {
            buffer: vec![Complex::default(); self.n],
            scratch: vec![Complex::default(); scratch_len],
        }
    }

    fn load_real(&self, x: &[T], ws: &mut OperatorWorkspace<T>) {
        ws.buffer.iter_mut().zip(x).for_each(|(b, &v)| *b = Complex::new(v, T::zero()));
        self.forward.process_with_scratch(&mut ws.buffer, &mut ws.scratch);
    }

    /// Out-of-band spectrum of the first difference of `folded` (length `N`).
    pub fn measure(&self, folded: &[T], source: MeasurementSource) -> Result<MeasurementVector<T>> {
        check_len(self.n, folded.len())?;
        check_finite(folded)?;
        let diff = first_difference(folded)?;
        Ok(MeasurementVector { values: self.apply_forward(&diff)?, source })
    }

    /// `V·x` via one length-`N` FFT restricted to `U_N`.
    pub fn apply_forward(&self, x: &[T]) -> Result<Vec<Complex<T>>> {
        check_len(self.n, x.len())?;
        let mut ws = self.workspace();
        self.load_real(x, &mut ws);
        Ok(self.indices.iter().map(|&k| ws.buffer[k]).collect())
    }

    /// `Re(V^H y)` via a zero-filled unnormalized inverse FFT.
    pub fn apply_adjoint(&self, y: &[Complex<T>]) -> Result<Vec<T>> {
        check_len(self.m(), y.len())?;
        let mut ws = self.workspace();
        let mut out = vec![T::zero(); self.n];
        self.adjoint_into(y.iter().copied(), &mut ws, &mut out);
        Ok(out)
    }

    fn adjoint_into(
        &self,
        y: impl Iterator<Item = Complex<T>>,
        ws: &mut OperatorWorkspace<T>,
        out: &mut [T],
    ) {
        ws.buffer.iter_mut().for_each(|b| *b = Complex::default());
        for (&k, v) in self.indices.iter().zip(y) {
            ws.buffer[k] = v;
        }
        self.inverse.process_with_scratch(&mut ws.buffer, &mut ws.scratch);
        out.iter_mut().zip(&ws.buffer).for_each(|(o, c)| *o = c.re);
    }

    /// Writes `Re(V^H (V x − y))` into `out` and returns `‖V x − y‖²`.
    pub fn normal_residual_into(
        &self,
        x: &[T],
        y: &MeasurementVector<T>,
        ws: &mut OperatorWorkspace<T>,
        out: &mut [T],
    ) -> T {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.m());
        self.load_real(x, ws);
        let residual: Vec<Complex<T>> = self
            .indices
            .iter()
            .zip(&y.values)
            .map(|(&k, &v)| ws.buffer[k] - v)
            .collect();
        let norm_sq = residual.iter().map(|c| c.norm_sqr()).sum();
        self.adjoint_into(residual.into_iter(), ws, out);
        norm_sq
    }

    /// `g(m) = Σ_{k∈U} cos(2πkm/N)`, so that `(V^H V)[a, b] = g((a − b) mod N)`.
    pub fn gram_kernel(&self) -> &[T] {
        self.gram_kernel.get_or_init(|| {
            let ones = vec![Complex::new(T::one(), T::zero()); self.m()];
            let mut ws = self.workspace();
            let mut out = vec![T::zero(); self.n];
            self.adjoint_into(ones.into_iter(), &mut ws, &mut out);
            out
        })
    }

    /// Row-major `V_T^H V_T` for a support set `T`.
    pub fn restricted_gram(&self, support: &[usize]) -> Vec<T> {
        let g = self.gram_kernel();
        let s = support.len();
        let mut out = vec![T::zero(); s * s];
        for (i, &a) in support.iter().enumerate() {
            for (j, &b) in support.iter().enumerate() {
                out[i * s + j] = g[(a + self.n - b) % self.n];
            }
        }
        out
    }

    fn check_support(&self, support: &[usize]) -> Result<()> {
        if support.len() > self.m() {
            return Err(Error::SupportTooLarge { support: support.len(), m: self.m() });
        }
        if let Some(&bad) = support.iter().find(|&&t| t >= self.n) {
            return Err(Error::param("support", format!("index {bad} out of range for N={}", self.n)));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("support", "indices must be strictly increasing"));
        }
        Ok(())
    }

    /// Least-squares amplitudes on `T`: solves `(V_T^H V_T) x = Re(V_T^H y)`.
    pub fn restricted_pseudoinverse(&self, support: &[usize], y: &MeasurementVector<T>) -> Result<Vec<T>> {
        check_len(self.m(), y.len())?;
        self.check_support(support)?;
        if support.is_empty() {
            return Ok(Vec::new());
        }
        let s = support.len();
        let gram = self.restricted_gram(support);
        let mut factor = gram.clone();
        if !linalg::cholesky_in_place(&mut factor, s) {
            return Err(Error::IllConditioned { cond: f64::INFINITY });
        }
        let cond = linalg::condition_estimate(&gram, &factor, s);
        log::debug!("restricted Gram |T|={s} cond~{cond:e}");
        if !(cond <= MAX_CONDITION) {
            return Err(Error::IllConditioned { cond });
        }
        let mut ws = self.workspace();
        let mut back = vec![T::zero(); self.n];
        self.adjoint_into(y.values.iter().copied(), &mut ws, &mut back);
        let mut x: Vec<T> = support.iter().map(|&t| back[t]).collect();
        linalg::cholesky_solve(&factor, s, &mut x);
        Ok(x)
    }
}
