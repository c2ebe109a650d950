//! Metric invariants of Chevalley-Eilenberg models computed on invariant
//! forms: comass, least comass in a class, stable norms, stable systoles,
//! isoperimetric quotients and volume.

mod comass;
mod convex;
mod metric;
mod stable;
mod systole;

use serde::Serialize;

pub use comass::{comass, comass_with, Comass, ComassEvaluator, ComassMethod, Evaluation};
pub use convex::{maximize_dual, minimize_comass, Maximum, Minimum};
pub use metric::InvariantMetric;
pub use stable::{check_invariant, MinComass, MinComassReport, NormProfile, StableNorm};
pub use systole::{
    isoperimetric_quotient, least_comass_primitive, stable_systole, systole_report, volume, DegreeReport, Isoperimetric,
    IsoperimetricReport, Primitive,
    StableSystole, SystoleEntry, SystoleReport,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryOptions {
    /// Relative width allowed for certified brackets.
    pub tol: f64,
    pub seed: u64,
    pub starts: usize,
    pub max_iter: usize,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        Self { tol: 1e-6, seed: 7, starts: 12, max_iter: 400 }
    }
}
