//! Proof-chain verifiers. Each run checks the hypotheses of one selector
//! against the cohomology ring, then evaluates every step of the chain at
//! one invariant metric.

mod common;
pub mod hypotheses;
mod prop81;
pub mod report;
mod scenario;
mod thm22;
mod thm222;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::cohomology::CohomologyRing;
use crate::error::PipelineError;
use crate::geometry::{GeometryOptions, InvariantMetric, NormProfile};

pub use common::{ClassReport, FamilyReport, PrimitiveReport};
pub use hypotheses::check_hypotheses;
pub use prop81::verify_prop81;
pub use report::{Bracket, ChainLine, HypothesisCheck, HypothesisReport, TripleReport, VerificationReport};
pub use scenario::{logspace, run_scenario, GridSpec, GridSummary, RunRecord, ScenarioReport, ScenarioSpec, Status};
pub use thm22::verify_chain_thm22;
pub use thm222::verify_chain_thm222;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Selector {
    Thm22,
    Thm222,
    Prop81,
    BanaszczykOnly,
}

impl Selector {
    pub const ALL: [Selector; 4] = [Selector::Thm22, Selector::Thm222, Selector::Prop81, Selector::BanaszczykOnly];

    pub fn name(self) -> &'static str {
        match self {
            Selector::Thm22 => "thm22",
            Selector::Thm222 => "thm222",
            Selector::Prop81 => "prop81",
            Selector::BanaszczykOnly => "banaszczyk-only",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Selector {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Selector::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Selector::ALL.iter().map(|x| x.name()).collect();
            PipelineError::Scenario(format!("unknown selector {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

pub(crate) fn metric_strings(metric: &InvariantMetric) -> Vec<Vec<String>> {
    let g = metric.gram();
    (0..g.rows()).map(|i| (0..g.cols()).map(|j| crate::rational::format_rational(g.get(i, j))).collect()).collect()
}

/// Each right side is at least the previous one, up to relative `tol`.
pub(crate) fn monotone(rs: &[Bracket], tol: f64) -> bool {
    rs.windows(2).all(|w| w[1].value >= w[0].value * (1.0 - tol) - tol)
}

/// Transference between `H^m` with the least-comass norm and `H_m` with the
/// stable norm: `lambda_i(H_m) lambda_{b-i+1}(H^m) >= 1` for each `i`.
pub fn verify_banaszczyk(
    ring: &CohomologyRing,
    metric: &InvariantMetric,
    m: usize,
    opts: &GeometryOptions,
) -> Result<VerificationReport, PipelineError> {
    let hypotheses = hypotheses::check_banaszczyk(ring, m)?;
    if !hypotheses.passed {
        return Err(PipelineError::Hypothesis(hypotheses.failures()));
    }
    let profile = NormProfile::new(ring, metric, m, opts)?;
    let family = common::Family::build(ring, &profile)?;
    let homology = common::SystoleClass::find(&profile, profile.betti())?;
    let b = family.len();
    let mu: Vec<Bracket> = homology.minima.lambdas.iter().map(Bracket::from_norm).collect();
    let chain: Vec<ChainLine> = (0..b)
        .map(|i| {
            let p = mu[i].mul(family.norms[b - 1 - i]);
            ChainLine::new(
                &format!("transference_{}", i + 1),
                format!("1 <= lambda_{}(H_{m}) lambda_{}(H^{m})", i + 1, b - i),
                Bracket::exact(1.0),
                p,
            )
        })
        .collect();
    let bn = b as f64 * (1.0 + (b as f64).ln());
    let top = mu[0].mul(family.last());
    let mut constants = BTreeMap::new();
    constants.insert("b".to_string(), b as f64);
    constants.insert("b_1_plus_log_b".to_string(), bn);
    let mut quantities = BTreeMap::new();
    quantities.insert(format!("lambda1_H_{m}_times_Lambda_H^{m}"), top);
    Ok(VerificationReport {
        selector: Selector::BanaszczykOnly.name().into(),
        model: ring.model().name().into(),
        m,
        metric: metric_strings(metric),
        hypotheses,
        x0: Some(homology.report()),
        branch: None,
        families: vec![family.report()],
        iq: None,
        primitives: Vec::new(),
        triple: None,
        constants,
        quantities,
        chain,
        implied_constant: Some(top.scale(1.0 / bn)),
        dimensionless_margin: None,
        monotone: true,
        certified: false,
        passed: false,
    }
    .finish())
}

/// Dispatches on the selector. `covolume` is the volume of the integral
/// lattice in the frame coordinates (used in the volume version).
pub fn verify(
    selector: Selector,
    ring: &CohomologyRing,
    metric: &InvariantMetric,
    m: usize,
    covolume: &crate::rational::Rational,
    opts: &GeometryOptions,
) -> Result<VerificationReport, PipelineError> {
    match selector {
        Selector::Thm22 => verify_chain_thm22(ring, metric, m, opts),
        Selector::Thm222 => verify_chain_thm222(ring, metric, covolume, opts),
        Selector::Prop81 => verify_prop81(ring, metric, opts),
        Selector::BanaszczykOnly => verify_banaszczyk(ring, metric, m, opts),
    }
}
