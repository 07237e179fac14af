//! Recovery of gradient-sparse signals from incomplete, noisy Fourier
//! measurements by total-variation minimization, with the sampling schemes,
//! dual-certificate machinery and experiment harness used to study it.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod io;
pub mod rng;
pub mod sampling;
pub mod solver;
pub mod transforms;

pub use error::{Error, Result};
