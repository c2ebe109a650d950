//! Triple Massey products with their indeterminacy, quasiorthogonal Massey
//! elements built from a family of classes and fixed primitives, and the
//! integrality of their pairings with integral cycles.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{CohomologyClass, CohomologyRing, HomologyClass};
use crate::dga::Cochain;
use crate::error::{MasseyError, ModelError};
use crate::linalg::Subspace;
use crate::rational::{format_rational, rationals_to_strings, Rational};

/// How primitives `x` with `dx = alpha` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveChoice {
    /// Echelon back-substitution (free variables zero).
    Echelon,
    /// Integral cocycle representatives and integral primitives.
    Integral,
}

fn sign(k: usize) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `<u, v, w>` as a representative class plus indeterminacy subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct MasseyCoset {
    pub inputs: (CohomologyClass, CohomologyClass, CohomologyClass),
    /// Cochains `a, b, c` actually used for `u, v, w`.
    pub cochains: (Cochain, Cochain, Cochain),
    /// `dx = a b`.
    pub x: Cochain,
    /// `dy = b c`.
    pub y: Cochain,
    pub representative: CohomologyClass,
    pub indet: Subspace,
}

impl MasseyCoset {
    pub fn degree(&self) -> usize {
        self.representative.degree
    }

    /// The coset does not contain zero.
    pub fn is_nontrivial(&self) -> bool {
        !self.indet.contains(&self.representative.coords).unwrap_or(true)
    }

    /// The coset is the single class of its representative.
    pub fn is_singleton(&self) -> bool {
        self.indet.is_zero()
    }
}

fn undefined(which: &'static str, coords: &[Rational]) -> MasseyError {
    MasseyError::Undefined { which, coords: rationals_to_strings(coords) }
}

fn primitive(ring: &CohomologyRing, alpha: &Cochain, choice: PrimitiveChoice) -> Result<Cochain, MasseyError> {
    if alpha.degree == 0 || alpha.degree > ring.top_degree() {
        // Nothing to solve: the product vanishes for degree reasons.
        return Ok(Cochain::new(alpha.degree.saturating_sub(1), vec![Rational::zero(); ring.model().dim(alpha.degree.saturating_sub(1))]));
    }
    Ok(match choice {
        PrimitiveChoice::Echelon => ring.model().solve_primitive(alpha)?,
        PrimitiveChoice::Integral => ring.model().solve_integral_primitive(alpha)?,
    })
}

fn cochain_for(ring: &CohomologyRing, a: &CohomologyClass, choice: PrimitiveChoice) -> Result<Cochain, MasseyError> {
    Ok(match choice {
        PrimitiveChoice::Echelon => a.representative.clone(),
        PrimitiveChoice::Integral => ring.integral_representative(a)?,
    })
}

/// `u H^{|v|+|w|-1} + H^{|u|+|v|-1} w`.
pub fn indeterminacy(
    ring: &CohomologyRing,
    u: &CohomologyClass,
    v: &CohomologyClass,
    w: &CohomologyClass,
) -> Result<Subspace, MasseyError> {
    let target = u.degree + v.degree + w.degree - 1;
    let dim = ring.betti(target);
    if dim == 0 {
        return Ok(Subspace::zero(0));
    }
    let mut gens = Vec::new();
    if let Some(left) = (v.degree + w.degree).checked_sub(1) {
        for h in ring.basis(left) {
            gens.push(ring.cup(u, &h)?.coords);
        }
    }
    if let Some(right) = (u.degree + v.degree).checked_sub(1) {
        for h in ring.basis(right) {
            gens.push(ring.cup(&h, w)?.coords);
        }
    }
    Ok(Subspace::span(dim, &gens).map_err(ModelError::from)?)
}

pub fn massey_triple(
    ring: &CohomologyRing,
    u: &CohomologyClass,
    v: &CohomologyClass,
    w: &CohomologyClass,
) -> Result<MasseyCoset, MasseyError> {
    massey_triple_with(ring, u, v, w, PrimitiveChoice::Echelon)
}

/// Representative `x c - (-1)^{|u|} a y` with `dx = ab`, `dy = bc`.
pub fn massey_triple_with(
    ring: &CohomologyRing,
    u: &CohomologyClass,
    v: &CohomologyClass,
    w: &CohomologyClass,
    choice: PrimitiveChoice,
) -> Result<MasseyCoset, MasseyError> {
    let uv = ring.cup(u, v)?;
    if !uv.is_zero() {
        return Err(undefined("u*v", &uv.coords));
    }
    let vw = ring.cup(v, w)?;
    if !vw.is_zero() {
        return Err(undefined("v*w", &vw.coords));
    }
    let model = ring.model();
    let a = cochain_for(ring, u, choice)?;
    let b = cochain_for(ring, v, choice)?;
    let c = cochain_for(ring, w, choice)?;
    let x = primitive(ring, &model.wedge(&a, &b)?, choice)?;
    let y = primitive(ring, &model.wedge(&b, &c)?, choice)?;
    let rep = massey_cochain(ring, &x, &c, &a, &y, u.degree)?;
    let representative = ring.class_of(&rep)?;
    let indet = indeterminacy(ring, u, v, w)?;
    Ok(MasseyCoset { inputs: (u.clone(), v.clone(), w.clone()), cochains: (a, b, c), x, y, representative, indet })
}

fn massey_cochain(
    ring: &CohomologyRing,
    x: &Cochain,
    c: &Cochain,
    a: &Cochain,
    y: &Cochain,
    u_degree: usize,
) -> Result<Cochain, MasseyError> {
    let model = ring.model();
    let mut rep = model.wedge(x, c)?;
    let ay = model.wedge(a, y)?;
    if rep.coeffs.is_empty() {
        return Ok(rep);
    }
    rep.axpy(&-sign(u_degree), &ay);
    Ok(rep)
}

pub fn is_nontrivial(c: &MasseyCoset) -> bool {
    c.is_nontrivial()
}

/// Span of the classes `[z c]` and `[a z']` over closed `z`, `z'` of the
/// primitive degrees: the change of the representative when the primitives
/// move by closed cochains. Equals the indeterminacy.
pub fn primitive_ambiguity(ring: &CohomologyRing, coset: &MasseyCoset) -> Result<Subspace, MasseyError> {
    let model = ring.model();
    let target = coset.degree();
    let dim = ring.betti(target);
    if dim == 0 {
        return Ok(Subspace::zero(0));
    }
    let (a, _, c) = &coset.cochains;
    let mut gens = Vec::new();
    for z in model.cocycle_space(coset.x.degree).basis() {
        let z = Cochain::new(coset.x.degree, z.clone());
        gens.push(ring.project(&model.wedge(&z, c)?)?);
    }
    for z in model.cocycle_space(coset.y.degree).basis() {
        let z = Cochain::new(coset.y.degree, z.clone());
        gens.push(ring.project(&model.wedge(a, &z)?)?);
    }
    Ok(Subspace::span(dim, &gens).map_err(ModelError::from)?)
}

/// Pairing of the coset representative with an integral homology class; the
/// value must be an integer.
pub fn integrality_check(ring: &CohomologyRing, coset: &MasseyCoset, x0: &HomologyClass) -> Result<BigInt, MasseyError> {
    let value = ring.pair_with_homology(&coset.representative, x0)?;
    if !value.is_integer() {
        return Err(MasseyError::NotIntegral { value: format_rational(&value) });
    }
    Ok(value.to_integer())
}

/// Classes `v_1..v_b` of one degree with primitives `w_ij` of `v_i v_j`
/// wherever that product is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiFamily {
    pub degree: usize,
    pub classes: Vec<CohomologyClass>,
    /// Cochains standing for the classes (the `v_i` at cochain level).
    pub forms: Vec<Cochain>,
    /// Norms `||v_i||*` when built against a metric.
    pub norms: Option<Vec<f64>>,
    primitives: BTreeMap<(usize, usize), Cochain>,
}

impl QuasiFamily {
    /// Family over the integral basis of `H^m` with deterministic primitives.
    pub fn integral_basis(ring: &CohomologyRing, m: usize, choice: PrimitiveChoice) -> Result<Self, MasseyError> {
        let classes: Vec<CohomologyClass> = (0..ring.betti(m)).map(|i| ring.integral_class(m, i)).collect();
        Self::from_classes(ring, classes, choice)
    }

    pub fn from_classes(ring: &CohomologyRing, classes: Vec<CohomologyClass>, choice: PrimitiveChoice) -> Result<Self, MasseyError> {
        let forms = classes.iter().map(|c| cochain_for(ring, c, choice)).collect::<Result<Vec<_>, _>>()?;
        let mut primitives = BTreeMap::new();
        for i in 0..forms.len() {
            for j in 0..forms.len() {
                let p = ring.model().wedge(&forms[i], &forms[j])?;
                if ring.project(&p)?.iter().all(Zero::is_zero) {
                    primitives.insert((i, j), primitive(ring, &p, choice)?);
                }
            }
        }
        let degree = classes.first().map_or(0, |c| c.degree);
        Ok(Self { degree, classes, forms, norms: None, primitives })
    }

    /// Family with externally chosen forms and primitives (e.g. comass-minimal ones);
    /// every primitive is verified exactly.
    pub fn with_primitives(
        ring: &CohomologyRing,
        classes: Vec<CohomologyClass>,
        forms: Vec<Cochain>,
        primitives: BTreeMap<(usize, usize), Cochain>,
        norms: Option<Vec<f64>>,
    ) -> Result<Self, MasseyError> {
        let model = ring.model();
        for ((i, j), w) in &primitives {
            let (vi, vj) = (forms.get(*i).ok_or(MasseyError::Index { index: *i, size: forms.len() })?, &forms[*j]);
            if model.d(w)? != model.wedge(vi, vj)? {
                return Err(ModelError::Validity(format!("w_{i}{j} is not a primitive of v_{i} v_{j}")).into());
            }
        }
        for (c, f) in classes.iter().zip(&forms) {
            if ring.project(f)? != c.coords {
                return Err(ModelError::Validity("form does not represent its class".into()).into());
            }
        }
        let degree = classes.first().map_or(0, |c| c.degree);
        Ok(Self { degree, classes, forms, norms, primitives })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn primitive(&self, i: usize, j: usize) -> Option<&Cochain> {
        self.primitives.get(&(i, j))
    }

    pub fn primitives(&self) -> &BTreeMap<(usize, usize), Cochain> {
        &self.primitives
    }

    fn check_index(&self, i: usize) -> Result<(), MasseyError> {
        if i >= self.len() {
            return Err(MasseyError::Index { index: i, size: self.len() });
        }
        Ok(())
    }
}

/// `[w_st v_r - (-1)^m v_s w_tr]` with its cochain.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiElement {
    pub indices: (usize, usize, usize),
    pub cochain: Cochain,
    pub class: CohomologyClass,
}

pub fn quasiorthogonal_massey_element(
    ring: &CohomologyRing,
    family: &QuasiFamily,
    s: usize,
    t: usize,
    r: usize,
) -> Result<QuasiElement, MasseyError> {
    for i in [s, t, r] {
        family.check_index(i)?;
    }
    let w_st = family.primitive(s, t).ok_or(MasseyError::MissingPrimitive(s, t))?;
    let w_tr = family.primitive(t, r).ok_or(MasseyError::MissingPrimitive(t, r))?;
    let cochain = massey_cochain(ring, w_st, &family.forms[r], &family.forms[s], w_tr, family.degree)?;
    let class = ring.class_of(&cochain)?;
    Ok(QuasiElement { indices: (s, t, r), cochain, class })
}

/// Exact check of
/// `(a^i b^j w_ij) g - (-1)^m a (b^j g^k w_jk) = a^i b^j g^k (w_ij v_k - (-1)^m v_i w_jk)`
/// at cochain level, with `a = a^i v_i` and so on.
pub fn linearity_identity_check(
    ring: &CohomologyRing,
    family: &QuasiFamily,
    alpha: &[Rational],
    beta: &[Rational],
    gamma: &[Rational],
) -> Result<bool, MasseyError> {
    let n = family.len();
    for v in [alpha, beta, gamma] {
        if v.len() != n {
            return Err(MasseyError::Index { index: v.len(), size: n });
        }
    }
    let model = ring.model();
    let m = family.degree;
    let combine = |coeffs: &[Rational]| {
        let mut out = model.zero(m);
        for (c, f) in coeffs.iter().zip(&family.forms) {
            out.axpy(c, f);
        }
        out
    };
    let (a, g) = (combine(alpha), combine(gamma));
    let prim_deg = (2 * m).saturating_sub(1);
    let mut x = model.zero(prim_deg);
    let mut y = model.zero(prim_deg);
    for i in 0..n {
        for j in 0..n {
            let ab = &alpha[i] * &beta[j];
            if !ab.is_zero() {
                x.axpy(&ab, family.primitive(i, j).ok_or(MasseyError::MissingPrimitive(i, j))?);
            }
            let bg = &beta[i] * &gamma[j];
            if !bg.is_zero() {
                y.axpy(&bg, family.primitive(i, j).ok_or(MasseyError::MissingPrimitive(i, j))?);
            }
        }
    }
    let lhs = massey_cochain(ring, &x, &g, &a, &y, m)?;
    let mut rhs = model.zero(lhs.degree);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = &alpha[i] * &beta[j] * &gamma[k];
                if c.is_zero() {
                    continue;
                }
                let q = quasiorthogonal_massey_element(ring, family, i, j, k)?;
                if !q.cochain.coeffs.is_empty() {
                    rhs.axpy(&c, &q.cochain);
                }
            }
        }
    }
    Ok(lhs.coeffs.is_empty() && rhs.coeffs.is_empty() || lhs == rhs)
}

/// Outcome of the spanning test for `H^{3m-1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpanningCheck {
    pub sufficient: bool,
    pub target_dim: usize,
    pub spanned_dim: usize,
    /// Triples whose quasiorthogonal element is nonzero with zero indeterminacy.
    pub contributing: Vec<(usize, usize, usize)>,
    /// Basis of the span reached, in class coordinates.
    pub spanned: Vec<Vec<String>>,
}

/// Sufficient test: quasiorthogonal elements of Massey triples over the
/// integral basis of `H^m` with zero indeterminacy span `H^{3m-1}`.
pub fn massey_spanning_check(ring: &CohomologyRing, m: usize) -> Result<SpanningCheck, MasseyError> {
    let target = 3 * m - 1;
    let target_dim = ring.betti(target);
    if target_dim == 0 {
        return Ok(SpanningCheck { sufficient: true, target_dim, spanned_dim: 0, contributing: Vec::new(), spanned: Vec::new() });
    }
    let family = QuasiFamily::integral_basis(ring, m, PrimitiveChoice::Echelon)?;
    let b = family.len();
    let triples: Vec<(usize, usize, usize)> =
        (0..b).flat_map(|s| (0..b).flat_map(move |t| (0..b).map(move |r| (s, t, r)))).collect();
    let found: Vec<Option<((usize, usize, usize), Vec<Rational>)>> = triples
        .par_iter()
        .map(|&(s, t, r)| -> Result<_, MasseyError> {
            if family.primitive(s, t).is_none() || family.primitive(t, r).is_none() {
                return Ok(None);
            }
            let q = quasiorthogonal_massey_element(ring, &family, s, t, r)?;
            if q.class.is_zero() {
                return Ok(None);
            }
            let indet = indeterminacy(ring, &family.classes[s], &family.classes[t], &family.classes[r])?;
            Ok(indet.is_zero().then_some(((s, t, r), q.class.coords)))
        })
        .collect::<Result<_, _>>()?;
    let mut contributing = Vec::new();
    let mut vecs = Vec::new();
    for (idx, coords) in found.into_iter().flatten() {
        contributing.push(idx);
        vecs.push(coords);
    }
    let span = Subspace::span(target_dim, &vecs).map_err(ModelError::from)?;
    Ok(SpanningCheck {
        sufficient: span.dim() == target_dim,
        target_dim,
        spanned_dim: span.dim(),
        contributing,
        spanned: span.basis().iter().map(|v| rationals_to_strings(v)).collect(),
    })
}

/// One line of the triple table for a degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripleSummary {
    pub indices: (usize, usize, usize),
    pub defined: bool,
    /// The nonzero product that blocks the definition.
    pub undefined_reason: Option<String>,
    pub representative: Option<Vec<String>>,
    pub indet_dim: Option<usize>,
    pub nontrivial: Option<bool>,
}

/// All triples over the basis of `H^m`.
pub fn all_triples(ring: &CohomologyRing, m: usize) -> Result<Vec<TripleSummary>, MasseyError> {
    let b = ring.betti(m);
    let triples: Vec<(usize, usize, usize)> =
        (0..b).flat_map(|s| (0..b).flat_map(move |t| (0..b).map(move |r| (s, t, r)))).collect();
    triples
        .par_iter()
        .map(|&(s, t, r)| {
            let (u, v, w) = (ring.basis_class(m, s), ring.basis_class(m, t), ring.basis_class(m, r));
            match massey_triple(ring, &u, &v, &w) {
                Ok(c) => Ok(TripleSummary {
                    indices: (s, t, r),
                    defined: true,
                    undefined_reason: None,
                    representative: Some(rationals_to_strings(&c.representative.coords)),
                    indet_dim: Some(c.indet.dim()),
                    nontrivial: Some(c.is_nontrivial()),
                }),
                Err(MasseyError::Undefined { which, coords }) => Ok(TripleSummary {
                    indices: (s, t, r),
                    defined: false,
                    undefined_reason: Some(format!("{which} = ({})", coords.join(", "))),
                    representative: None,
                    indet_dim: None,
                    nontrivial: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::{build_chevalley_eilenberg, LieStructure};
    use crate::rational::rat;

    fn heis() -> CohomologyRing {
        CohomologyRing::compute(&build_chevalley_eilenberg(&LieStructure::heisenberg(), "heis").unwrap()).unwrap()
    }

    #[test]
    fn heisenberg_triples() {
        let r = heis();
        let (e1, e2) = (r.basis_class(1, 0), r.basis_class(1, 1));
        let c = massey_triple(&r, &e1, &e1, &e2).unwrap();
        // x = 0, y = -e3, rep = -(-1) e1 ^ (-e3) = -e1^e3
        assert!(c.x.is_zero());
        assert_eq!(c.y.coeffs, vec![rat(0), rat(0), rat(-1)]);
        assert_eq!(c.representative.coords, vec![rat(-1), rat(0)]);
        assert!(c.indet.is_zero());
        assert!(c.is_nontrivial());
        let c2 = massey_triple(&r, &e2, &e2, &e1).unwrap();
        assert_eq!(c2.representative.coords, vec![rat(0), rat(1)]);
        assert!(c2.is_nontrivial());
    }

    #[test]
    fn zero_input_is_trivial() {
        let r = heis();
        let c = massey_triple(&r, &r.zero_class(1), &r.basis_class(1, 0), &r.basis_class(1, 1)).unwrap();
        assert!(!c.is_nontrivial());
    }

    #[test]
    fn torus_indeterminacy_fills_h2() {
        let m = build_chevalley_eilenberg(&LieStructure::abelian(3), "T3").unwrap();
        let r = CohomologyRing::compute(&m).unwrap();
        let indet = indeterminacy(&r, &r.basis_class(1, 0), &r.basis_class(1, 1), &r.basis_class(1, 1)).unwrap();
        assert_eq!(indet.dim(), 3);
        assert!(matches!(
            massey_triple(&r, &r.basis_class(1, 0), &r.basis_class(1, 1), &r.basis_class(1, 1)),
            Err(MasseyError::Undefined { which: "u*v", .. })
        ));
    }

    #[test]
    fn spanning_heisenberg_and_torus() {
        let s = massey_spanning_check(&heis(), 1).unwrap();
        assert!(s.sufficient);
        assert_eq!(s.spanned_dim, 2);
        let t = CohomologyRing::compute(&build_chevalley_eilenberg(&LieStructure::abelian(3), "T3").unwrap()).unwrap();
        assert!(!massey_spanning_check(&t, 1).unwrap().sufficient);
    }

    #[test]
    fn quasi_element_and_integrality() {
        let r = heis();
        let f = QuasiFamily::integral_basis(&r, 1, PrimitiveChoice::Integral).unwrap();
        let q = quasiorthogonal_massey_element(&r, &f, 0, 0, 1).unwrap();
        assert_eq!(q.class.coords, vec![rat(-1), rat(0)]);
        let c = massey_triple_with(&r, &f.classes[0], &f.classes[0], &f.classes[1], PrimitiveChoice::Integral).unwrap();
        let x0 = HomologyClass { degree: 2, coords: vec![rat(1), rat(0)] };
        assert_eq!(integrality_check(&r, &c, &x0).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn ambiguity_equals_indeterminacy() {
        let t = CohomologyRing::compute(&build_chevalley_eilenberg(&LieStructure::abelian(3), "T3").unwrap()).unwrap();
        let e1 = t.basis_class(1, 0);
        let c = massey_triple(&t, &e1, &e1, &e1).unwrap();
        assert_eq!(primitive_ambiguity(&t, &c).unwrap(), c.indet);
        assert!(!c.is_nontrivial());
    }

    #[test]
    fn linearity_small_case() {
        let r = heis();
        let f = QuasiFamily::integral_basis(&r, 1, PrimitiveChoice::Echelon).unwrap();
        assert!(linearity_identity_check(&r, &f, &[rat(1), rat(0)], &[rat(1), rat(0)], &[rat(0), rat(1)]).unwrap());
        assert!(linearity_identity_check(&r, &f, &[rat(0), rat(0)], &[rat(0), rat(0)], &[rat(0), rat(0)]).unwrap());
    }
}
