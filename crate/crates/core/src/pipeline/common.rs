//! Pieces shared by the verifiers: quasiorthogonal families, least-comass
//! primitives, systole classes.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::Serialize;

use crate::cohomology::{CohomologyClass, CohomologyRing, HomologyClass};
use crate::dga::Cochain;
use crate::error::PipelineError;
use crate::geometry::{comass_with, least_comass_primitive, ComassEvaluator, GeometryOptions, InvariantMetric, NormProfile};
use crate::lattice::{minima_prefix, witness_index, MinimaProfile, NormedLattice, DEFAULT_BUDGET};
use crate::massey::QuasiFamily;
use crate::pipeline::report::Bracket;
use crate::rational::{rationals_to_strings, Rational};

/// Quasiorthogonal family of `H^k(Z)` for the least-comass norm.
#[derive(Clone, Debug)]
pub struct Family {
    pub degree: usize,
    pub minima: MinimaProfile,
    pub index: num_bigint::BigInt,
    pub classes: Vec<CohomologyClass>,
    pub forms: Vec<Cochain>,
    pub norms: Vec<Bracket>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub degree: usize,
    pub lambdas: Vec<Bracket>,
    /// Integral coordinates of the family members.
    pub witnesses: Vec<Vec<i64>>,
    /// Index of the sublattice they span.
    pub index: String,
    pub forms: Vec<Vec<String>>,
}

impl Family {
    pub fn build(ring: &CohomologyRing, profile: &NormProfile) -> Result<Self, PipelineError> {
        let k = profile.degree();
        let lattice = NormedLattice::standard(profile.cohomology_norm()?);
        let minima = minima_prefix(&lattice, lattice.rank(), DEFAULT_BUDGET)?;
        let index = witness_index(&minima.witnesses)?;
        let mut classes = Vec::new();
        let mut forms = Vec::new();
        let mut norms = Vec::new();
        for z in &minima.witnesses {
            let zr: Vec<Rational> = z.iter().map(|&x| Rational::from_integer(x.into())).collect();
            classes.push(ring.class_from_integral(k, &zr)?);
            let mc = profile.min_comass(&zr)?;
            norms.push(Bracket::with_estimate(&mc.value, mc.estimate));
            forms.push(mc.witness);
        }
        Ok(Self { degree: k, minima, index, classes, forms, norms })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }


    /// The last successive minimum.
    pub fn last(&self) -> Bracket {
        *self.norms.last().expect("nonempty family")
    }

    pub fn report(&self) -> FamilyReport {
        FamilyReport {
            degree: self.degree,
            lambdas: self.norms.clone(),
            witnesses: self.minima.witnesses.clone(),
            index: self.index.to_string(),
            forms: self.forms.iter().map(|f| rationals_to_strings(&f.coeffs)).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveReport {
    /// 1-based indices into the family.
    pub pair: (usize, usize),
    pub wedge_comass: Bracket,
    pub primitive_comass: Bracket,
    /// `IQ * comass(v_i v_j)`.
    pub bound: Bracket,
    pub holds: bool,
    pub primitive: Vec<String>,
}

/// Least-comass primitives `w_ij` of `v_i v_j` for all ordered pairs, with
/// the isoperimetric bound `|w_ij| <= IQ |v_i v_j|` checked on each.
pub struct Primitives {
    pub map: BTreeMap<(usize, usize), Cochain>,
    pub wedge: BTreeMap<(usize, usize), Bracket>,
    pub comass: BTreeMap<(usize, usize), Bracket>,
    pub reports: Vec<PrimitiveReport>,
}

pub fn primitives(
    ring: &CohomologyRing,
    metric: &InvariantMetric,
    family: &Family,
    iq: Bracket,
    opts: &GeometryOptions,
) -> Result<Primitives, PipelineError> {
    let model = ring.model();
    let ev = ComassEvaluator::new(metric, 2 * family.degree, opts);
    let b = family.len();
    let mut out = Primitives { map: BTreeMap::new(), wedge: BTreeMap::new(), comass: BTreeMap::new(), reports: Vec::new() };
    for i in 0..b {
        for j in 0..b {
            let vv = model.wedge(&family.forms[i], &family.forms[j])?;
            let c = comass_with(&ev, &vv.coeffs, opts.tol);
            let wedge = Bracket::with_estimate(&c.value, c.estimate);
            let p = least_comass_primitive(model, metric, &vv, opts)?;
            let pc = Bracket::with_estimate(&p.value, p.estimate);
            let bound = iq.mul(wedge);
            out.reports.push(PrimitiveReport {
                pair: (i + 1, j + 1),
                wedge_comass: wedge,
                primitive_comass: pc,
                bound,
                holds: pc.lower <= bound.upper,
                primitive: rationals_to_strings(&p.cochain.coeffs),
            });
            out.map.insert((i, j), p.cochain);
            out.wedge.insert((i, j), wedge);
            out.comass.insert((i, j), pc);
        }
    }
    Ok(out)
}

pub fn quasi_family(ring: &CohomologyRing, family: &Family, prims: &Primitives) -> Result<QuasiFamily, PipelineError> {
    Ok(QuasiFamily::with_primitives(
        ring,
        family.classes.clone(),
        family.forms.clone(),
        prims.map.clone(),
        Some(family.norms.iter().map(|b| b.value).collect()),
    )?)
}

/// Lexicographically least shortest class of `H_k(Z)` and the successive
/// minima of that lattice.
#[derive(Clone, Debug)]
pub struct SystoleClass {
    pub class: HomologyClass,
    pub witness: Vec<i64>,
    pub norm: Bracket,
    pub minima: MinimaProfile,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub degree: usize,
    pub coords: Vec<i64>,
    pub norm: Bracket,
}

impl SystoleClass {
    pub fn find(profile: &NormProfile, count: usize) -> Result<Self, PipelineError> {
        let k = profile.degree();
        if profile.betti() == 0 {
            return Err(PipelineError::Scenario(format!("H_{k} vanishes; there is no systole class")));
        }
        let lattice = NormedLattice::standard(profile.homology_norm()?);
        let minima = minima_prefix(&lattice, count.clamp(1, lattice.rank()), DEFAULT_BUDGET)?;
        let witness = minima.witnesses[0].clone();
        let class =
            HomologyClass { degree: k, coords: witness.iter().map(|&x| Rational::from_integer(x.into())).collect() };
        Ok(Self { class, norm: Bracket::from_norm(&minima.lambdas[0]), witness, minima })
    }

    pub fn report(&self) -> ClassReport {
        ClassReport { degree: self.class.degree, coords: self.witness.clone(), norm: self.norm }
    }
}

/// Integer value of a pairing, after checking integrality.
pub fn integral_pairing(value: &Rational) -> Result<i64, PipelineError> {
    if !value.is_integer() {
        return Err(crate::error::MasseyError::NotIntegral { value: crate::rational::format_rational(value) }.into());
    }
    let v = value.to_integer();
    i64::try_from(v.abs()).map(|a| if v.is_negative() { -a } else { a }).map_err(|_| PipelineError::Scenario("pairing overflows".into()))
}

pub fn binom(n: usize, k: usize) -> f64 {
    crate::dga::exterior::binomial(n, k) as f64
}
