//! Constants and point counts for Manin's conjecture on toric varieties.
//!
//! A fan with an optional finite Galois action is the single input. From it
//! the crate computes the leading constant `Θ = α·β·τ` of the asymptotic
//! `N(B) ~ Θ/(k-1)! · B (log B)^{k-1}` and counts points of bounded
//! anticanonical height exactly.

pub mod cone;
pub mod counter;
pub mod error;
pub mod exec;
pub mod fan;
pub mod heights;
pub mod linalg;
pub mod local;
pub mod picard;
pub mod polyhedral;
pub mod quadrature;
pub mod rational;
pub mod tamagawa;

pub use error::{Error, Result};
pub use exec::Execution;
