//! Exact-arithmetic Hilbert function and lattice-point counting for
//! group-based phylogenetic models on trees.
//!
//! The library builds the model polytope of a rooted tree over a finite
//! abelian group, counts its degree-`n` monomials (distinct `n`-fold vertex
//! sums), composes counts of tree pieces through toric fiber products, and
//! cross-checks everything against an independent polyhedral enumeration
//! over the vertex-generated lattice.

pub mod abelian;
pub mod error;
pub mod hilbert;
pub mod lattice;
pub mod model;
pub mod polyhedra;
pub mod tree;

pub use error::{Error, Result};
