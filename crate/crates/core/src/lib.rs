//! Computational toolkit for modular Sidon bases: constructions, exact
//! representation counting, elliptic-curve point counts, constructive
//! decompositions, a random sequence model with deletion processes,
//! sunflower detection and numeric audits of expectation estimates.

pub mod analysis;
pub mod curve;
pub mod decompose;
pub mod deletion;
pub mod error;
pub mod numbertheory;
pub mod random_model;
pub mod rational;
pub mod sidon;
pub mod sunflower;

pub use error::{Error, Result};
pub use rational::Rational;
