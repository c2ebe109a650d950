//! Exact rational and integer linear algebra: echelon forms, kernels,
//! Smith normal form and canonical subspaces.

mod integer;
mod matrix;
mod subspace;

pub use integer::{hermite_rows, smith_normal_form, IntMatrix, SmithDecomposition};
pub use matrix::{axpy, dot, is_zero_vec, RatMatrix, Rref};
pub use subspace::Subspace;
