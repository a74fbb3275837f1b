//! Verification of special Lagrangian gluing data in toric hyper-Kahler
//! manifolds: hyperplane arrangements, sigma-Delzant polytopes, the flat
//! local model with characterizing angles, quiver topology and the
//! holomorphic-Lagrangian obstructions.

pub mod arrangement;
pub mod error;
pub mod foundations;
pub mod local_model;
pub mod obstruction;
pub mod polytope;
pub mod quiver;

pub use error::{Error, Result};
