//! Scenario runs: one selector over one model, optionally across a grid of
//! metrics, serialized as a single deterministic report.

use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::CohomologyRing;
use crate::dga::ModelFile;
use crate::error::PipelineError;
use crate::geometry::{GeometryOptions, InvariantMetric};
use crate::pipeline::report::{HypothesisReport, VerificationReport};
use crate::pipeline::{check_hypotheses, verify, Selector};
use crate::rational::{dyadic, format_rational, Rational};

/// `<param>:<start>:<stop>:<count>`: `count` values `10^x` with `x` evenly
/// spaced in `[start, stop]`. `param` is `scale` (whole metric), `t` (last
/// frame vector) or `g<i>` (the `i`-th diagonal entry, 1-based).
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub param: String,
    pub values: Vec<Rational>,
}

/// `count` points `10^x`, `x` from `start` to `stop`. Integer exponents are
/// exact; others are rounded to 48 binary digits.
pub fn logspace(start: f64, stop: f64, count: usize) -> Vec<Rational> {
    (0..count)
        .map(|j| {
            let x = if count == 1 { start } else { start + (stop - start) * j as f64 / (count - 1) as f64 };
            if (x - x.round()).abs() < 1e-12 {
                let k = x.round() as i32;
                let ten = Rational::from_integer(10.into());
                if k >= 0 {
                    num_traits::pow(ten, k as usize)
                } else {
                    num_traits::pow(ten, (-k) as usize).recip()
                }
            } else {
                dyadic(10f64.powf(x), 48)
            }
        })
        .collect()
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<Self, PipelineError> {
        let bad = || PipelineError::Scenario(format!("grid {s:?}: expected <param>:<start>:<stop>:<count>"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let start: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[2].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[3].trim().parse().map_err(|_| bad())?;
        if count == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        let param = parts[0].trim().to_string();
        let ok = param == "scale" || param == "t" || param.strip_prefix('g').is_some_and(|i| i.parse::<usize>().is_ok_and(|i| i >= 1));
        if !ok {
            return Err(PipelineError::Scenario(format!("grid parameter {param:?}: expected scale, t or g<i>")));
        }
        Ok(Self { param, values: logspace(start, stop, count) })
    }

    /// The metric at one grid value.
    pub fn apply(&self, base: &InvariantMetric, value: &Rational) -> Result<InvariantMetric, PipelineError> {
        if self.param == "scale" {
            return Ok(base.scaled(value)?);
        }
        let n = base.dim();
        let i = if self.param == "t" { n } else { self.param[1..].parse::<usize>().unwrap_or(0) };
        if i == 0 || i > n {
            return Err(PipelineError::Scenario(format!("grid parameter {} out of range for dimension {n}", self.param)));
        }
        let mut rows: Vec<Vec<Rational>> = (0..n).map(|r| (0..n).map(|c| base.gram().get(r, c).clone()).collect()).collect();
        rows[i - 1][i - 1] = &rows[i - 1][i - 1] * value;
        let gram = crate::linalg::RatMatrix::from_rows(rows).map_err(crate::error::ModelError::from)?;
        Ok(InvariantMetric::new(gram)?)
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioSpec {
    pub file: ModelFile,
    pub selector: Selector,
    pub m: usize,
    pub grid: Option<GridSpec>,
    pub opts: GeometryOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Violated,
    Refused,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Violated => 1,
            Status::Refused => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub grid_value: Option<String>,
    pub report: VerificationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridSummary {
    pub param: String,
    pub values: Vec<String>,
    pub iq: Vec<Option<f64>>,
    /// increasing, decreasing, constant or mixed
    pub iq_trend: String,
    pub dimensionless_margins: Vec<Option<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub schema: u32,
    pub selector: String,
    pub model: String,
    pub m: usize,
    pub seed: u64,
    pub tol: f64,
    pub status: Status,
    pub hypotheses: HypothesisReport,
    pub grid: Option<GridSummary>,
    pub runs: Vec<RunRecord>,
}

fn trend(xs: &[Option<f64>], tol: f64) -> String {
    let v: Vec<f64> = xs.iter().flatten().copied().collect();
    if v.len() != xs.len() || v.len() < 2 {
        return "mixed".into();
    }
    let close = |a: f64, b: f64| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0);
    if v.windows(2).all(|w| close(w[0], w[1])) {
        "constant".into()
    } else if v.windows(2).all(|w| w[1] >= w[0] || close(w[0], w[1])) {
        "increasing".into()
    } else if v.windows(2).all(|w| w[1] <= w[0] || close(w[0], w[1])) {
        "decreasing".into()
    } else {
        "mixed".into()
    }
}

pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioReport, PipelineError> {
    let model = &spec.file.model;
    let ring = CohomologyRing::with_pairings(model, &spec.file.pairings)?;
    let m = match spec.selector {
        Selector::Thm222 | Selector::Prop81 => 2,
        _ => spec.m,
    };
    let hypotheses = check_hypotheses(spec.selector, &ring, m)?;
    let mut report = ScenarioReport {
        schema: 1,
        selector: spec.selector.name().into(),
        model: model.name().into(),
        m,
        seed: spec.opts.seed,
        tol: spec.opts.tol,
        status: Status::Refused,
        hypotheses,
        grid: None,
        runs: Vec::new(),
    };
    if !report.hypotheses.passed {
        return Ok(report);
    }
    let lie = model.lie_structure().ok_or(crate::error::GeometryError::NotInvariantModel)?;
    let base = match &spec.file.metric {
        Some(g) => InvariantMetric::new(g.clone())?,
        None => InvariantMetric::identity(lie.dim()),
    };
    let points: Vec<(Option<Rational>, InvariantMetric)> = match &spec.grid {
        None => vec![(None, base)],
        Some(g) => g.values.iter().map(|v| Ok((Some(v.clone()), g.apply(&base, v)?))).collect::<Result<_, PipelineError>>()?,
    };
    let runs: Vec<RunRecord> = points
        .par_iter()
        .map(|(v, metric)| {
            let r = verify(spec.selector, &ring, metric, m, &spec.file.covolume, &spec.opts)?;
            Ok(RunRecord { grid_value: v.as_ref().map(format_rational), report: r })
        })
        .collect::<Result<_, PipelineError>>()?;
    if let Some(g) = &spec.grid {
        let iq: Vec<Option<f64>> = runs.iter().map(|r| r.report.iq.as_ref().map(|q| q.estimate)).collect();
        report.grid = Some(GridSummary {
            param: g.param.clone(),
            values: g.values.iter().map(format_rational).collect(),
            iq_trend: trend(&iq, spec.opts.tol),
            iq,
            dimensionless_margins: runs.iter().map(|r| r.report.dimensionless_margin).collect(),
        });
    }
    report.status = if runs.iter().all(|r| r.report.passed) { Status::Pass } else { Status::Violated };
    report.runs = runs;
    Ok(report)
}
