//! Finite-dimensional differential graded algebras and their builders.

pub mod exterior;
pub mod io;
mod lie;
mod model;
mod simplicial;

pub use io::{load_model, parse_model, parse_model_str, ModelFile};
pub use lie::{build_chevalley_eilenberg, LieStructure, StructureConstant};
pub use model::{Cochain, CochainModel, Origin, ProductTable, ValidityReport};
pub use simplicial::{build_simplicial_cochains, minimal_torus, projective_plane, SimplicialComplex};
