//! Matrix permanents and the statistics of permanents of random matrices.
//!
//! The crate is organized bottom-up:
//!
//! * [`matrix`]: dense square matrices over pluggable scalar domains, the
//!   structured constructors (Schur/DFT, cycle, all-ones), Householder QR and
//!   LU log-determinants, and the `perm-matrix-v1` file format.
//! * [`permanent`]: naive, Ryser and Glynn permanents with Kahan-compensated
//!   accumulation and deterministic Gray-code block parallelism.
//! * [`modular`]: exact Schur permanents via prime fields and CRT.
//! * [`ensembles`]: reproducible Haar/Gaussian matrix samplers.
//! * [`geodesic`]: geodesics on U(n) towards the cycle and DFT matrices.
//! * [`stats`]: moments, KS machinery, Rayleigh/Weibull fits, complex
//!   Gaussian battery, alpha-stable estimation and normality tests.

pub mod ensembles;
pub mod error;
pub mod exec;
pub mod geodesic;
pub mod matrix;
pub mod modular;
pub mod permanent;
pub mod stats;

pub use error::{Error, Result};
pub use matrix::{CMatrix, ComplexScalar, Matrix, Scalar};
