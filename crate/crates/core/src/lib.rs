//! Pseudospectral laboratory for anisotropic wave systems.

pub mod error;
pub mod fft;
pub mod par;
pub mod cutoffs;
pub mod spectral;
pub mod solver;
pub mod harness;
pub mod identities;
pub mod vectorfield;

pub use error::{Error, Result};
