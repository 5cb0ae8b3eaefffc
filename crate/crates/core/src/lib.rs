//! Axisymmetric finite-element model of radiofrequency cardiac ablation
//! with Fourier (Pennes) and relaxed (Cattaneo–Vernotte) heat conduction.

pub mod bioheat;
pub mod electric;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod mesh;
pub mod oracles;
pub mod postprocess;

pub use error::{Error, Result};
