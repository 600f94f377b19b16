//! Modulo-ADC simulation and recovery of bandlimited signals from folded samples.
//!
//! The pipeline: generate a bandlimited test signal ([`signal`]), fold and
//! quantize it ([`modulo`]), observe the folding residual through its
//! out-of-band spectrum ([`spectral`]), and recover it ([`recovery`]).
//! [`bounds`] holds the jump-count and uniqueness bounds, [`io`] the text formats.

pub mod bounds;
pub mod error;
pub mod io;
mod linalg;
pub mod modulo;
pub mod recovery;
pub mod scalar;
pub mod signal;
pub mod spectral;

pub use bounds::BoundReport;
pub use error::{Error, Result};
pub use modulo::{FoldedRecord, QuantizerSpec};
pub use recovery::{IstaConfig, LassoConfig, OnebitConfig, Recovery, ResidualEstimate};
pub use scalar::Real;
pub use signal::SampledSignal;
pub use rustfft::num_complex::Complex;
pub use spectral::{MeasurementSource, MeasurementSystem, MeasurementVector};

pub type SignalF64 = SampledSignal<f64>;
pub type SignalF32 = SampledSignal<f32>;
pub type RecordF64 = FoldedRecord<f64>;
pub type RecordF32 = FoldedRecord<f32>;
pub type SystemF64 = MeasurementSystem<f64>;
pub type RecoveryF64 = Recovery<f64>;
