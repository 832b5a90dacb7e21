//! Invertible discrete auditory transform (DAT).
//!
//! A length-`N` frame is mapped to an `N × N/2` array of band signals by
//! spreading its DFT over Bark-scale critical bands. The transform conserves
//! energy and inverts in closed form. On top of it the crate provides a
//! spectral-thresholding denoiser for both the DFT and the DAT, synthetic
//! test material, WAV/CSV I/O and the `dat` command-line tool.

pub mod cli;
pub mod dat;
pub mod denoise;
pub mod error;
pub mod exec;
pub mod psychoacoustics;
pub mod signal_io;
pub mod spectral;

pub use error::{DatError, Result};
pub use exec::Execution;
