//! Exact computations with free Lie algebras, derivation lattices and
//! filtrations of the mapping class group of a surface with one boundary
//! component.

pub mod acceptance;
pub mod deriv;
pub mod filtration;
pub mod heegaard;
pub mod json;
pub mod lie;
pub mod par;
pub mod tree;
pub mod word;
pub mod zlinalg;
