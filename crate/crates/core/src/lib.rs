//! Generic torus-orbit fans of flag varieties, computed exactly from root data.
//!
//! For an anti-dominant weight `λ` the cone `σ_λ` is the union of the Weyl
//! chambers fixed setwise by the stabilizer `W_λ`; its `W`-translates form a
//! complete fan `Σ_λ`. The crate decides when `Σ_λ` is (ℚ-)Gorenstein-Fano or
//! smooth Fano, finds the root system spanned by its walls, and tests
//! lattice-regularity.

pub mod assoc;
pub mod cli;
pub mod error;
pub mod genericfan;
pub mod lattice;
pub mod linalg;
pub mod polyhedral;
pub mod report;
pub mod rootsys;
pub mod weyl;

#[cfg(test)]
mod properties;

pub use error::{Error, Result};
