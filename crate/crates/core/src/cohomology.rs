//! Cohomology of a cochain model as a graded ring, with the image of the
//! integral cochains in each degree and declared pairings with homology.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dga::{Cochain, CochainModel};
use crate::error::{CohomologyError, ModelError};
use crate::linalg::{axpy, dot, hermite_rows, is_zero_vec, smith_normal_form, IntMatrix, RatMatrix, Subspace};
use crate::rational::{format_rational, Rational};

/// A class in `H^k`, with coordinates in the ring's chosen basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    pub degree: usize,
    pub coords: Vec<Rational>,
    pub representative: Cochain,
}

impl CohomologyClass {
    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.coords)
    }
}

/// A real homology class given by coordinates dual to the integral basis of
/// `H^k`; integral classes have integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyClass {
    pub degree: usize,
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub coords: Vec<Rational>,
}

#[derive(Clone, Debug)]
struct Degree {
    boundaries: Subspace,
    /// Reduced echelon basis of a complement of the coboundaries in the cocycles.
    reps: Vec<Vec<Rational>>,
    rep_pivots: Vec<usize>,
    /// Rows: integral basis of the image of integral cocycles, in class coordinates.
    integral_basis: RatMatrix,
    /// Inverse of `integral_basis^T`: class coordinates -> integral coordinates.
    to_integral: RatMatrix,
    /// Integral cocycles representing the integral basis.
    integral_cocycles: Vec<Cochain>,
    torsion: Option<Vec<BigInt>>,
    pairing: RatMatrix,
}

#[derive(Clone, Debug)]
pub struct CohomologyRing {
    model: CochainModel,
    degrees: Vec<Degree>,
    /// `(k, l)` -> coordinates of `basis_k[i] * basis_l[j]` at `i * b_l + j`.
    cups: BTreeMap<(usize, usize), Vec<Vec<Rational>>>,
}

impl CohomologyRing {
    pub fn compute(model: &CochainModel) -> Result<Self, CohomologyError> {
        Self::with_pairings(model, &BTreeMap::new())
    }

    /// Computes the ring and installs declared pairing matrices (identity where absent).
    pub fn with_pairings(model: &CochainModel, pairings: &BTreeMap<usize, RatMatrix>) -> Result<Self, CohomologyError> {
        let top = model.top_degree();
        let mut degrees = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let boundaries = model.coboundary_space(k);
            let cocycles = model.cocycle_space(k);
            let reduced: Vec<Vec<Rational>> =
                cocycles.basis().iter().map(|z| boundaries.reduce(z)).collect::<Result<_, _>>().map_err(ModelError::from)?;
            let comp = Subspace::span(model.dim(k), &reduced).map_err(ModelError::from)?;
            let reps = comp.basis().to_vec();
            let rep_pivots = comp.pivots().to_vec();
            degrees.push(Degree {
                boundaries,
                reps,
                rep_pivots,
                integral_basis: RatMatrix::zeros(0, 0),
                to_integral: RatMatrix::zeros(0, 0),
                integral_cocycles: Vec::new(),
                torsion: None,
                pairing: RatMatrix::zeros(0, 0),
            });
        }
        let mut ring = Self { model: model.clone(), degrees, cups: BTreeMap::new() };

        for k in 0..=top {
            ring.install_integral(k)?;
            let b = ring.betti(k);
            let pairing = match pairings.get(&k) {
                Some(p) => p.clone(),
                None => RatMatrix::identity(b),
            };
            if pairing.rows() != b || pairing.cols() != b {
                return Err(CohomologyError::Shape { expected: b, found: pairing.rows() });
            }
            let det = pairing.determinant().map_err(ModelError::from)?;
            if IntMatrix::from_rational(&pairing).is_none() || det.abs() != Rational::one() {
                return Err(CohomologyError::PairingNotUnimodular { degree: k });
            }
            ring.degrees[k].pairing = pairing;
            ring.degrees[k].torsion = ring.compute_torsion(k);
        }

        for k in 0..=top {
            for l in 0..=top - k {
                let (bk, bl) = (ring.betti(k), ring.betti(l));
                let mut table = Vec::with_capacity(bk * bl);
                for i in 0..bk {
                    let a = ring.basis_class(k, i);
                    for j in 0..bl {
                        let b = ring.basis_class(l, j);
                        let prod = model.wedge(&a.representative, &b.representative)?;
                        table.push(ring.project(&prod)?);
                    }
                }
                ring.cups.insert((k, l), table);
            }
        }
        Ok(ring)
    }

    fn install_integral(&mut self, k: usize) -> Result<(), CohomologyError> {
        let b = self.betti(k);
        let dim = self.model.dim(k);
        let dk = self.model.integral_differential(k).ok_or(CohomologyError::LatticeNotClosed { degree: k })?;
        let kernel = if dk.rows() == 0 {
            IntMatrix::identity(dim).to_rational().to_rows()
        } else {
            smith_normal_form(&dk)
                .kernel_basis()
                .into_iter()
                .map(|v| v.into_iter().map(Rational::from_integer).collect())
                .collect()
        };
        let mut cocycles = Vec::with_capacity(kernel.len());
        let mut images = Vec::with_capacity(kernel.len());
        for z in &kernel {
            let c = self.model.from_lattice_coords(k, z)?;
            images.push(self.project(&c)?);
            cocycles.push(c);
        }
        let deg = &mut self.degrees[k];
        if b == 0 {
            deg.integral_basis = RatMatrix::zeros(0, 0);
            deg.to_integral = RatMatrix::zeros(0, 0);
            return Ok(());
        }
        // Clear denominators, then take a Z-basis of the generated row lattice.
        let denom = images.iter().flatten().fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
        let scale = Rational::from_integer(denom.clone());
        let rows: Vec<Vec<BigInt>> = images.iter().map(|r| r.iter().map(|x| (x * &scale).to_integer()).collect()).collect();
        let (basis, transform) = hermite_rows(&rows);
        if basis.len() != b {
            return Err(CohomologyError::Shape { expected: b, found: basis.len() });
        }
        let mut lifts = Vec::with_capacity(b);
        for coeffs in &transform {
            let mut c = self.model.zero(k);
            for (u, z) in coeffs.iter().zip(&cocycles) {
                if !u.is_zero() {
                    c.axpy(&Rational::from_integer(u.clone()), z);
                }
            }
            lifts.push(c);
        }
        let basis = RatMatrix::from_rows(
            basis.into_iter().map(|r| r.into_iter().map(|x| Rational::from_integer(x) / &scale).collect()).collect(),
        )
        .map_err(ModelError::from)?;
        let deg = &mut self.degrees[k];
        deg.to_integral = basis.transpose().inverse().map_err(ModelError::from)?;
        deg.integral_basis = basis;
        deg.integral_cocycles = lifts;
        Ok(())
    }

    fn compute_torsion(&self, k: usize) -> Option<Vec<BigInt>> {
        if k == 0 {
            return Some(Vec::new());
        }
        let d = self.model.integral_differential(k - 1)?;
        Some(smith_normal_form(&d).torsion())
    }

    pub fn model(&self) -> &CochainModel {
        &self.model
    }

    pub fn top_degree(&self) -> usize {
        self.model.top_degree()
    }

    pub fn betti(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, |d| d.reps.len())
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        (0..=self.top_degree()).map(|k| self.betti(k)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.betti_numbers().iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }

    pub fn representatives(&self, k: usize) -> &[Vec<Rational>] {
        self.degrees.get(k).map_or(&[], |d| d.reps.as_slice())
    }

    pub fn boundaries(&self, k: usize) -> Subspace {
        self.degrees.get(k).map_or_else(|| Subspace::zero(0), |d| d.boundaries.clone())
    }

    pub fn zero_class(&self, k: usize) -> CohomologyClass {
        CohomologyClass { degree: k, coords: vec![Rational::zero(); self.betti(k)], representative: self.model.zero(k) }
    }

    pub fn basis_class(&self, k: usize, i: usize) -> CohomologyClass {
        let mut coords = vec![Rational::zero(); self.betti(k)];
        coords[i] = Rational::one();
        CohomologyClass { degree: k, coords, representative: Cochain::new(k, self.degrees[k].reps[i].clone()) }
    }

    pub fn basis(&self, k: usize) -> Vec<CohomologyClass> {
        (0..self.betti(k)).map(|i| self.basis_class(k, i)).collect()
    }

    /// The class with the given coordinates, represented by the matching
    /// combination of basis representatives.
    pub fn class(&self, k: usize, coords: Vec<Rational>) -> Result<CohomologyClass, CohomologyError> {
        if coords.len() != self.betti(k) {
            return Err(CohomologyError::Shape { expected: self.betti(k), found: coords.len() });
        }
        let mut rep = self.model.zero(k);
        for (c, r) in coords.iter().zip(self.representatives(k)) {
            axpy(&mut rep.coeffs, c, r);
        }
        Ok(CohomologyClass { degree: k, coords, representative: rep })
    }

    /// Coordinates of the class of a closed cochain.
    pub fn project(&self, c: &Cochain) -> Result<Vec<Rational>, CohomologyError> {
        self.model.check_shape(c)?;
        let k = c.degree;
        if k > self.top_degree() {
            return Ok(Vec::new());
        }
        if !self.model.d(c)?.is_zero() {
            return Err(CohomologyError::NotClosed { degree: k });
        }
        let r = self.degrees[k].boundaries.reduce(&c.coeffs).map_err(ModelError::from)?;
        Ok(self.degrees[k].rep_pivots.iter().map(|&p| r[p].clone()).collect())
    }

    /// The class of a closed cochain, keeping the cochain as its representative.
    pub fn class_of(&self, c: &Cochain) -> Result<CohomologyClass, CohomologyError> {
        let coords = self.project(c)?;
        Ok(CohomologyClass { degree: c.degree, coords, representative: c.clone() })
    }

    pub fn cup(&self, a: &CohomologyClass, b: &CohomologyClass) -> Result<CohomologyClass, CohomologyError> {
        let deg = a.degree + b.degree;
        if deg > self.top_degree() {
            return Ok(CohomologyClass { degree: deg, coords: Vec::new(), representative: Cochain::new(deg, Vec::new()) });
        }
        let rep = self.model.wedge(&a.representative, &b.representative)?;
        self.class_of(&rep)
    }

    /// Coordinates of `basis_k[i] * basis_l[j]`.
    pub fn cup_basis(&self, k: usize, i: usize, l: usize, j: usize) -> Vec<Rational> {
        match self.cups.get(&(k, l)) {
            Some(t) => t[i * self.betti(l) + j].clone(),
            None => Vec::new(),
        }
    }

    /// Image of `H^k (x) H^l -> H^{k+l}` as a subspace.
    pub fn cup_image(&self, k: usize, l: usize) -> Subspace {
        let target = self.betti(k + l);
        let vecs: Vec<Vec<Rational>> = self.cups.get(&(k, l)).map(|t| t.clone()).unwrap_or_default();
        Subspace::span(target, &vecs).unwrap_or_else(|_| Subspace::zero(target))
    }

    pub fn cup_is_zero_on_degree(&self, m: usize) -> bool {
        if 2 * m > self.top_degree() {
            return true;
        }
        self.cups.get(&(m, m)).is_none_or(|t| t.iter().all(|v| is_zero_vec(v)))
    }

    /// Nonzero basis cup products of `H^m (x) H^m`, as `(i, j, coords)`.
    pub fn nonzero_cups(&self, k: usize, l: usize) -> Vec<(usize, usize, Vec<Rational>)> {
        let bl = self.betti(l);
        self.cups
            .get(&(k, l))
            .map(|t| {
                t.iter()
                    .enumerate()
                    .filter(|(_, v)| !is_zero_vec(v))
                    .map(|(idx, v)| (idx / bl, idx % bl, v.clone()))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Invariant factors greater than one of the integral coboundary into
    /// degree `k`, i.e. the torsion of `H^k(X, Z)`.
    pub fn torsion(&self, k: usize) -> Option<&[BigInt]> {
        self.degrees.get(k).and_then(|d| d.torsion.as_deref())
    }

    pub fn torsion_free(&self, k: usize) -> bool {
        self.torsion(k).is_some_and(|t| t.is_empty())
    }

    /// Rows span the image of integral cocycles in class coordinates.
    pub fn integral_basis(&self, k: usize) -> &RatMatrix {
        &self.degrees[k].integral_basis
    }

    pub fn integral_cocycle(&self, k: usize, i: usize) -> &Cochain {
        &self.degrees[k].integral_cocycles[i]
    }

    pub fn integral_class(&self, k: usize, i: usize) -> CohomologyClass {
        CohomologyClass {
            degree: k,
            coords: self.degrees[k].integral_basis.row(i).to_vec(),
            representative: self.degrees[k].integral_cocycles[i].clone(),
        }
    }

    /// The class with the given coordinates in the integral basis.
    pub fn class_from_integral(&self, k: usize, z: &[Rational]) -> Result<CohomologyClass, CohomologyError> {
        let coords = self.degrees[k].integral_basis.vec_mul(z).map_err(ModelError::from)?;
        self.class(k, coords)
    }

    /// Coordinates of a class in the integral basis.
    pub fn integral_coords(&self, a: &CohomologyClass) -> Result<Vec<Rational>, CohomologyError> {
        if a.coords.len() != self.betti(a.degree) {
            return Err(CohomologyError::Shape { expected: self.betti(a.degree), found: a.coords.len() });
        }
        Ok(self.degrees[a.degree].to_integral.mul_vec(&a.coords).map_err(ModelError::from)?)
    }

    /// Integral cocycle representing an integral class.
    pub fn integral_representative(&self, a: &CohomologyClass) -> Result<Cochain, CohomologyError> {
        let z = self.integral_coords(a)?;
        if !z.iter().all(|x| x.is_integer()) {
            return Err(CohomologyError::NotIntegral { degree: a.degree });
        }
        let mut c = self.model.zero(a.degree);
        for (zi, lift) in z.iter().zip(&self.degrees[a.degree].integral_cocycles) {
            c.axpy(zi, lift);
        }
        Ok(c)
    }

    pub fn is_integral(&self, a: &CohomologyClass) -> Result<bool, CohomologyError> {
        Ok(self.integral_coords(a)?.iter().all(|x| x.is_integer()))
    }

    pub fn pairing_matrix(&self, k: usize) -> &RatMatrix {
        &self.degrees[k].pairing
    }

    /// `<a, x0> = z^T P x0` with `z` the integral coordinates of `a` and `P`
    /// the declared pairing matrix.
    pub fn pair_with_homology(&self, a: &CohomologyClass, x0: &HomologyClass) -> Result<Rational, CohomologyError> {
        if a.degree != x0.degree {
            return Err(CohomologyError::DegreeMismatch { left: a.degree, right: x0.degree });
        }
        let b = self.betti(a.degree);
        if x0.coords.len() != b {
            return Err(CohomologyError::Shape { expected: b, found: x0.coords.len() });
        }
        let z = self.integral_coords(a)?;
        let px = self.degrees[a.degree].pairing.mul_vec(&x0.coords).map_err(ModelError::from)?;
        Ok(dot(&z, &px))
    }

    pub fn summary(&self) -> CohomologySummary {
        let top = self.top_degree();
        let degrees = (0..=top)
            .map(|k| DegreeSummary {
                degree: k,
                betti: self.betti(k),
                cochain_dim: self.model.dim(k),
                representatives: self
                    .representatives(k)
                    .iter()
                    .map(|r| describe(r, self.model.labels(k)))
                    .collect(),
                torsion: self.torsion(k).map(|t| t.iter().map(ToString::to_string).collect()),
                integral_basis: self
                    .integral_basis(k)
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(format_rational).collect())
                    .collect(),
            })
            .collect();
        let mut cups = Vec::new();
        for k in 1..=top {
            for l in k..=top - k {
                for (i, j, v) in self.nonzero_cups(k, l) {
                    cups.push(CupEntry { left: (k, i), right: (l, j), product: v.iter().map(format_rational).collect() });
                }
            }
        }
        CohomologySummary {
            model: self.model.name().to_string(),
            betti: self.betti_numbers(),
            euler_characteristic: self.euler_characteristic(),
            degrees,
            nonzero_cups: cups,
        }
    }
}

/// Human-readable linear combination of basis labels.
pub fn describe(v: &[Rational], labels: &[String]) -> String {
    let terms: Vec<String> = v
        .iter()
        .zip(labels)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, l)| {
            if c.is_one() {
                l.clone()
            } else if (-c).is_one() {
                format!("-{l}")
            } else {
                format!("{}*{l}", format_rational(c))
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ").replace("+ -", "- ")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeSummary {
    pub degree: usize,
    pub betti: usize,
    pub cochain_dim: usize,
    pub representatives: Vec<String>,
    /// `None` when the differential does not preserve the integral lattice.
    pub torsion: Option<Vec<String>>,
    pub integral_basis: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CupEntry {
    pub left: (usize, usize),
    pub right: (usize, usize),
    pub product: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologySummary {
    pub model: String,
    pub betti: Vec<usize>,
    pub euler_characteristic: i64,
    pub degrees: Vec<DegreeSummary>,
    pub nonzero_cups: Vec<CupEntry>,
}

/// Torsion-freeness of `H^k(X, Z)`: the integral coboundary into degree `k`
/// has no invariant factor greater than one.
pub fn torsion_free_check(model: &CochainModel, k: usize) -> Result<bool, CohomologyError> {
    if k == 0 || k > model.top_degree() {
        return Ok(true);
    }
    let d = model.integral_differential(k - 1).ok_or(CohomologyError::LatticeNotClosed { degree: k - 1 })?;
    Ok(smith_normal_form(&d).torsion().is_empty())
}

pub fn compute_cohomology(model: &CochainModel) -> Result<CohomologyRing, CohomologyError> {
    CohomologyRing::compute(model)
}

pub fn cup_is_zero_on_degree(ring: &CohomologyRing, m: usize) -> bool {
    ring.cup_is_zero_on_degree(m)
}

/// Sign-insensitive helper: the largest absolute value among rationals.
pub fn max_abs(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::{build_chevalley_eilenberg, build_simplicial_cochains, minimal_torus, projective_plane, LieStructure};
    use crate::rational::rat;

    fn heis() -> CohomologyRing {
        CohomologyRing::compute(&build_chevalley_eilenberg(&LieStructure::heisenberg(), "heis").unwrap()).unwrap()
    }

    #[test]
    fn heisenberg_ring() {
        let r = heis();
        assert_eq!(r.betti_numbers(), vec![1, 2, 2, 1]);
        assert!(r.cup_is_zero_on_degree(1));
        let reps: Vec<String> = r.representatives(2).iter().map(|v| describe(v, r.model().labels(2))).collect();
        assert_eq!(reps, ["e1^e3", "e2^e3"]);
        assert!(r.torsion_free(2));
    }

    #[test]
    fn unit_acts_trivially() {
        let r = heis();
        let one = r.basis_class(0, 0);
        for a in r.basis(2) {
            assert_eq!(r.cup(&one, &a).unwrap().coords, a.coords);
        }
    }

    #[test]
    fn torus_cups() {
        let m = build_chevalley_eilenberg(&LieStructure::abelian(3), "T3").unwrap();
        let r = CohomologyRing::compute(&m).unwrap();
        assert_eq!(r.betti_numbers(), vec![1, 3, 3, 1]);
        assert!(!r.cup_is_zero_on_degree(1));
        assert_eq!(r.cup(&r.basis_class(1, 0), &r.basis_class(1, 1)).unwrap().coords, vec![rat(1), rat(0), rat(0)]);
    }

    #[test]
    fn simplicial_torsion() {
        let t = build_simplicial_cochains(&minimal_torus(), "T2").unwrap();
        assert!(torsion_free_check(&t, 1).unwrap());
        assert!(torsion_free_check(&t, 2).unwrap());
        let p = build_simplicial_cochains(&projective_plane(), "RP2").unwrap();
        assert!(!torsion_free_check(&p, 2).unwrap());
        let rp = CohomologyRing::compute(&p).unwrap();
        assert_eq!(rp.betti_numbers(), vec![1, 0, 0]);
        assert_eq!(rp.torsion(2).unwrap().len(), 1);
    }

    #[test]
    fn pairing_rules() {
        let r = heis();
        let x = HomologyClass { degree: 2, coords: vec![rat(1), rat(0)] };
        assert_eq!(r.pair_with_homology(&r.basis_class(2, 0), &x).unwrap(), rat(1));
        assert_eq!(r.pair_with_homology(&r.basis_class(2, 1), &x).unwrap(), rat(0));
        assert_eq!(r.pair_with_homology(&r.zero_class(2), &x).unwrap(), rat(0));
        assert!(r.pair_with_homology(&r.basis_class(1, 0), &x).is_err());
    }

    #[test]
    fn non_unimodular_pairing_rejected() {
        let m = build_chevalley_eilenberg(&LieStructure::heisenberg(), "heis").unwrap();
        let mut p = BTreeMap::new();
        p.insert(2, RatMatrix::from_i64(&[&[2, 0], &[0, 1]]));
        assert!(matches!(CohomologyRing::with_pairings(&m, &p), Err(CohomologyError::PairingNotUnimodular { degree: 2 })));
    }

    #[test]
    fn not_closed_rejected() {
        let r = heis();
        let e3 = r.model().basis_cochain(1, 2);
        assert!(matches!(r.project(&e3), Err(CohomologyError::NotClosed { degree: 1 })));
    }
}
