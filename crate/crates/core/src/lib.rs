//! Exact computations for Brieskorn homology spheres: Seifert invariants,
//! plumbing lattices, diagonal embeddings, equivariant fixed-point data and
//! slice obstructions for the associated knots.

pub mod error;
pub mod equivariant;
pub mod exact;
pub mod invariants;
pub mod json;
pub mod knots;
pub mod obstruct;
pub mod lattice;
pub mod plumbing;
pub mod seifert;

#[cfg(test)]
pub(crate) mod fixtures;

pub use error::{Error, Result};
