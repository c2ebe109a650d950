//! Exact cochain algebra, Massey products, lattice successive minima and
//! invariant comass geometry, assembled into checks of systolic inequality
//! chains on finite models.

pub mod cohomology;
pub mod dga;
pub mod lattice;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod massey;
pub mod pipeline;
pub mod rational;

pub use dga::{Cochain, CochainModel, LieStructure, ModelFile, SimplicialComplex};
pub use error::*;
pub use linalg::{smith_normal_form, IntMatrix, RatMatrix, SmithDecomposition, Subspace};
pub use rational::Rational;
