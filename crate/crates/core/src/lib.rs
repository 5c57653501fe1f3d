//! Null spectra of sample cross-covariance matrices between two independent
//! Gaussian datasets.
//!
//! * [`stieltjes`]: limiting density from the cubic for the Stieltjes
//!   transform.
//! * [`edges`]: exact and closed-form support edges.
//! * [`ensemble`]: reproducible Monte Carlo reference spectra.
//! * [`detection`]: flags singular values above the noise band.

pub mod compare;
pub mod cubic;
pub mod detection;
pub mod edges;
pub mod ensemble;
pub mod error;
pub mod rng;
pub mod spectral;
pub mod stieltjes;

pub use error::{Error, Result};
