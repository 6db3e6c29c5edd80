//! Solvers for a two-component Bose-Einstein condensate coupled to a lossy
//! optical cavity: Holstein-Primakoff expansion around mean-field branches,
//! third-quantized spectra of the quadratic Liouvillian, Gaussian moment
//! dynamics, stability maps, and exact finite-size Liouvillians.
//!
//! Units: rates are angular frequencies in kHz, times are in ms, ħ = 1.

pub mod error;
pub mod finite;
pub mod linalg;
pub mod model;
pub mod moments;
pub mod stability;
pub mod third_quantization;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
