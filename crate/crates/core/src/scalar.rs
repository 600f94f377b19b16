//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Floating-point scalar the library is generic over (`f32` or `f64`).
///
/// `FftNum` pulls in `num_traits::Signed`, which shares method names with
/// `Float` (`abs`, `signum`). Call those through `Float::abs(x)` in generic code.
pub trait Real: Float + FloatConst + FftNum + Sum + Display + Debug + FromStr + Default {
    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for finite inputs to `f32`/`f64`.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(v).expect("f64 literal must convert")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        <Self as num_traits::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn of_usize(v: usize) -> Self {
        Self::lit(v as f64)
    }
}

impl Real for f32 {}
impl Real for f64 {}
