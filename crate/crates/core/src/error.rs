use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("input is identically zero")]
    ZeroSignal,

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("sample {value} at index {index} exceeds the quantizer range ±{lambda}")]
    OutOfRange { index: usize, value: f64, lambda: f64 },

    #[error("no out-of-band measurements for N={n}, OF={of}")]
    NoMeasurements { n: usize, of: f64 },

    #[error("support exceeds measurement capacity (|T|={support}, M={m})")]
    SupportTooLarge { support: usize, m: usize },

    #[error("restricted Gram matrix is ill-conditioned (cond ~ {cond:e})")]
    IllConditioned { cond: f64 },

    #[error("divergence: non-finite ISTA iterate at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("value {value} at index {index} is not an integer multiple of 2*lambda")]
    OffLattice { index: usize, value: f64 },

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

pub(crate) fn check_finite<T: num_traits::Float>(xs: &[T]) -> Result<()> {
    match xs.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}
