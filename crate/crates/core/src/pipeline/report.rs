use serde::Serialize;

use crate::lattice::NormValue;

/// Bracket `[lower, upper]` around a nonnegative quantity with a point value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bracket {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Relative slack put around exactly known values converted to floating point.
const ROUNDING: f64 = 4.0 * f64::EPSILON;

impl Bracket {
    pub fn exact(v: f64) -> Self {
        Self { value: v, lower: v * (1.0 - ROUNDING), upper: v * (1.0 + ROUNDING) }
    }

    pub fn new(value: f64, lower: f64, upper: f64) -> Self {
        Self { value, lower, upper }
    }

    pub fn from_norm(v: &NormValue) -> Self {
        match v {
            NormValue::Interval { lo, hi } => Self { value: 0.5 * (lo + hi), lower: *lo, upper: *hi },
            v => Self::exact(v.to_f64()),
        }
    }

    /// Point value `estimate` inside the bracket of `v`.
    pub fn with_estimate(v: &NormValue, estimate: f64) -> Self {
        let b = Self::from_norm(v);
        Self { value: estimate.clamp(b.lower, b.upper), ..b }
    }

    pub fn mul(self, o: Bracket) -> Bracket {
        Bracket { value: self.value * o.value, lower: self.lower * o.lower, upper: self.upper * o.upper }
    }

    pub fn add(self, o: Bracket) -> Bracket {
        Bracket { value: self.value + o.value, lower: self.lower + o.lower, upper: self.upper + o.upper }
    }

    pub fn scale(self, c: f64) -> Bracket {
        Bracket { value: self.value * c, lower: self.lower * c, upper: self.upper * c }
    }

    pub fn div(self, o: Bracket) -> Bracket {
        Bracket { value: self.value / o.value, lower: self.lower / o.upper, upper: self.upper / o.lower }
    }

    pub fn powi(self, k: i32) -> Bracket {
        Bracket { value: self.value.powi(k), lower: self.lower.powi(k), upper: self.upper.powi(k) }
    }

    pub fn min(self, o: Bracket) -> Bracket {
        Bracket { value: self.value.min(o.value), lower: self.lower.min(o.lower), upper: self.upper.min(o.upper) }
    }
}

/// One checked inequality `lhs <= rhs`.
#[derive(Clone, Debug, Serialize)]
pub struct ChainLine {
    pub step: String,
    pub statement: String,
    pub lhs: Bracket,
    pub rhs: Bracket,
    /// `rhs.upper - lhs.lower`; negative only when the brackets refute the line.
    pub margin: f64,
    /// `1 - lhs / rhs` on point values.
    pub relative_margin: f64,
    pub holds: bool,
    /// The brackets prove the line (`lhs.upper <= rhs.lower`).
    pub certified: bool,
}

impl ChainLine {
    pub fn new(step: &str, statement: impl Into<String>, lhs: Bracket, rhs: Bracket) -> Self {
        let margin = rhs.upper - lhs.lower;
        let relative_margin = if rhs.value > 0.0 { 1.0 - lhs.value / rhs.value } else { f64::NEG_INFINITY };
        Self {
            step: step.into(),
            statement: statement.into(),
            lhs,
            rhs,
            margin,
            relative_margin,
            holds: margin >= 0.0,
            certified: lhs.upper <= rhs.lower,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub selector: String,
    pub m: usize,
    pub checks: Vec<HypothesisCheck>,
    pub passed: bool,
}

impl HypothesisReport {
    pub fn new(selector: &str, m: usize, checks: Vec<HypothesisCheck>) -> Self {
        let passed = checks.iter().all(|c| c.holds);
        Self { selector: selector.into(), m, checks, passed }
    }

    pub fn verdict(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.holds)
    }

    pub fn failures(&self) -> String {
        let bad: Vec<String> = self.checks.iter().filter(|c| !c.holds).map(|c| format!("{} ({})", c.name, c.detail)).collect();
        bad.join("; ")
    }
}

pub(crate) fn check(name: &str, holds: bool, detail: impl Into<String>) -> HypothesisCheck {
    HypothesisCheck { name: name.into(), holds, detail: detail.into() }
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleReport {
    /// 1-based indices `(s, t, r)` into the family.
    pub indices: (usize, usize, usize),
    /// Extra factor `v_p` (fundamental-class pairing), 1-based.
    pub partner: Option<usize>,
    pub cochain: Vec<String>,
    pub class: Vec<String>,
    pub pairing: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub selector: String,
    pub model: String,
    pub m: usize,
    pub metric: Vec<Vec<String>>,
    pub hypotheses: HypothesisReport,
    pub x0: Option<crate::pipeline::common::ClassReport>,
    pub branch: Option<String>,
    pub families: Vec<crate::pipeline::common::FamilyReport>,
    pub iq: Option<crate::geometry::IsoperimetricReport>,
    pub primitives: Vec<crate::pipeline::common::PrimitiveReport>,
    pub triple: Option<TripleReport>,
    pub constants: std::collections::BTreeMap<String, f64>,
    pub quantities: std::collections::BTreeMap<String, Bracket>,
    pub chain: Vec<ChainLine>,
    /// Smallest constant for which the headline inequality holds at this metric.
    pub implied_constant: Option<Bracket>,
    /// `1 - lhs / rhs` of the final line; unchanged under scaling of the metric.
    pub dimensionless_margin: Option<f64>,
    /// Each step's right side is at least the previous one.
    pub monotone: bool,
    pub certified: bool,
    pub passed: bool,
}

impl VerificationReport {
    pub(crate) fn finish(mut self) -> Self {
        let eq42 = self.primitives.iter().all(|p| p.holds);
        self.passed = self.hypotheses.passed && eq42 && self.chain.iter().all(|l| l.holds);
        self.certified = self.passed && self.chain.iter().all(|l| l.certified);
        self
    }
}
