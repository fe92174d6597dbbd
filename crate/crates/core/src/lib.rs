//! Modular data, commutative algebra objects and categorical coset systems.
//!
//! The crate works entirely with numerical shadows of modular tensor
//! categories: normalized S-matrices, twists, fusion coefficients and
//! multiplicity vectors.

#![allow(clippy::needless_range_loop)]

pub mod coset;
pub mod error;
pub mod extension;
pub mod fixtures;
pub mod generators;
pub mod modular;
pub mod spectral;
pub mod tolerance;

pub use error::{Error, Result};
pub use modular::{
    CMatrix, Check, DualPlacement, FusionTensor, ModularData, ObjectVector, QuantumDims,
    ValidationReport, C64,
};
