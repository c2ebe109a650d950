//! Successive minima of lattices in normed spaces, dual lattices and
//! transference products.

mod enumerate;
pub mod io;
mod minima;
mod norm;
mod polytope;

pub use enumerate::enumerate_ellipsoid;
pub use io::{load_lattice, parse_lattice, parse_lattice_str};
pub use minima::{
    dual_lattice, minima_by_box, minima_prefix, quasiorthogonal_family, successive_minima, transference_profile,
    witness_index, MinimaProfile, MinimaReport, NormedLattice, QuasiorthogonalFamily, TransferenceProfile,
    TransferenceReport, DEFAULT_BUDGET,
};
pub use norm::{perfect_square, ExternalEval, NormKind, NormOracle, NormValue, ValueReport};
pub use polytope::polar_normals;
