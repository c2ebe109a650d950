use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use crate::error::LatticeError;
use crate::lattice::enumerate::enumerate_ellipsoid;
use crate::lattice::norm::{NormOracle, NormValue, ValueReport};
use crate::linalg::{RatMatrix, Subspace};
use crate::rational::{format_rational, Rational};

pub const DEFAULT_BUDGET: usize = 5_000_000;

/// Full-rank lattice in a normed space; rows of `basis` are the generators.
#[derive(Clone, Debug)]
pub struct NormedLattice {
    basis: RatMatrix,
    norm: NormOracle,
}

impl NormedLattice {
    pub fn new(basis: RatMatrix, norm: NormOracle) -> Result<Self, LatticeError> {
        if !basis.is_square() || basis.cols() != norm.dim() {
            return Err(LatticeError::InvalidNorm(format!(
                "basis is {}x{} but the norm lives in dimension {}",
                basis.rows(),
                basis.cols(),
                norm.dim()
            )));
        }
        let rank = basis.rank();
        if rank != basis.rows() {
            return Err(LatticeError::Degenerate { rank, dim: basis.rows() });
        }
        Ok(Self { basis, norm })
    }

    /// `Z^b` with the given norm.
    pub fn standard(norm: NormOracle) -> Self {
        let b = norm.dim();
        Self { basis: RatMatrix::identity(b), norm }
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn norm(&self) -> &NormOracle {
        &self.norm
    }

    pub fn vector(&self, z: &[i64]) -> Vec<Rational> {
        let z: Vec<Rational> = z.iter().map(|&x| Rational::from_integer(x.into())).collect();
        self.basis.vec_mul(&z).expect("coefficient length equals rank")
    }

    pub fn scaled(&self, c: &Rational) -> NormedLattice {
        Self { basis: self.basis.scale(c), norm: self.norm.clone() }
    }

    /// Basis `(B^{-1})^T` with the dual norm.
    pub fn dual(&self) -> Result<NormedLattice, LatticeError> {
        let basis = self.basis.inverse()?.transpose();
        NormedLattice::new(basis, self.norm.dual()?)
    }

    /// Gram of the lower-bound form in lattice coordinates, `B Q B^T`.
    fn coefficient_gram(&self) -> Result<Vec<Vec<f64>>, LatticeError> {
        Ok(self.basis.mul(self.norm.lower_gram())?.mul(&self.basis.transpose())?.to_f64())
    }
}

pub fn dual_lattice(l: &NormedLattice) -> Result<NormedLattice, LatticeError> {
    l.dual()
}

#[derive(Clone, Debug)]
pub struct MinimaProfile {
    pub lambdas: Vec<NormValue>,
    /// Coefficients of the witnesses in the lattice basis.
    pub witnesses: Vec<Vec<i64>>,
    pub vectors: Vec<Vec<Rational>>,
    /// Final enumeration radius (of the quadratic lower bound).
    pub radius: f64,
    pub enumerated: usize,
    /// All values exact (quadratic or polyhedral norm).
    pub exact: bool,
}

impl MinimaProfile {
    pub fn last(&self) -> &NormValue {
        self.lambdas.last().expect("nonempty profile")
    }

    pub fn report(&self) -> MinimaReport {
        MinimaReport {
            lambdas: self.lambdas.iter().map(NormValue::report).collect(),
            witnesses: self.witnesses.clone(),
            vectors: self.vectors.iter().map(|v| v.iter().map(format_rational).collect()).collect(),
            radius: self.radius,
            enumerated: self.enumerated,
            exact: self.exact,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimaReport {
    pub lambdas: Vec<ValueReport>,
    pub witnesses: Vec<Vec<i64>>,
    pub vectors: Vec<Vec<String>>,
    pub radius: f64,
    pub enumerated: usize,
    pub exact: bool,
}

pub fn successive_minima(l: &NormedLattice) -> Result<MinimaProfile, LatticeError> {
    minima_prefix(l, l.rank(), DEFAULT_BUDGET)
}

/// The first `count` successive minima. Enumerates every lattice point whose
/// quadratic lower bound is within radius `R`, growing `R` until `count`
/// independent vectors of norm at most `R` are confirmed; candidates are taken
/// greedily by (norm, coefficient vector).
pub fn minima_prefix(l: &NormedLattice, count: usize, budget: usize) -> Result<MinimaProfile, LatticeError> {
    let b = l.rank();
    let count = count.min(b);
    let gram = l.coefficient_gram()?;
    let basis_norms: Vec<f64> = (0..b)
        .map(|i| {
            let mut z = vec![0; b];
            z[i] = 1;
            l.norm.norm(&l.vector(&z)).upper()
        })
        .collect();
    let r_max = basis_norms.iter().cloned().fold(0.0, f64::max);
    let mut radius = basis_norms.iter().cloned().fold(f64::INFINITY, f64::min);
    loop {
        let pts = enumerate_ellipsoid(&gram, radius * radius, budget).map_err(|e| match e {
            LatticeError::BudgetExceeded { budget, .. } => LatticeError::BudgetExceeded { budget, radius },
            e => e,
        })?;
        let enumerated = pts.len();
        let mut cands: Vec<(NormValue, Vec<i64>)> = pts
            .into_iter()
            .map(|z| (l.norm.norm(&l.vector(&z)), z))
            .filter(|(n, _)| n.upper() <= radius * (1.0 + 1e-12))
            .collect();
        cands.sort_by(|a, b| a.0.cmp_value(&b.0).then_with(|| a.1.cmp(&b.1)));
        let mut chosen: Vec<(NormValue, Vec<i64>)> = Vec::new();
        let mut span = Subspace::zero(b);
        for (n, z) in cands {
            if chosen.len() == count {
                break;
            }
            let zr: Vec<Rational> = z.iter().map(|&x| Rational::from_integer(x.into())).collect();
            if span.contains(&zr)? {
                continue;
            }
            span = span.sum(&Subspace::span(b, &[zr])?)?;
            chosen.push((n, z));
        }
        if chosen.len() == count {
            let exact = l.norm.is_exact();
            return Ok(MinimaProfile {
                vectors: chosen.iter().map(|(_, z)| l.vector(z)).collect(),
                lambdas: chosen.iter().map(|(n, _)| n.clone()).collect(),
                witnesses: chosen.into_iter().map(|(_, z)| z).collect(),
                radius,
                enumerated,
                exact,
            });
        }
        radius = if radius < r_max { (2.0 * radius).min(r_max * (1.0 + 1e-9)) } else { 2.0 * radius };
    }
}

/// Witnesses of the successive minima with the index of the sublattice they span.
#[derive(Clone, Debug)]
pub struct QuasiorthogonalFamily {
    pub profile: MinimaProfile,
    pub index: BigInt,
}

impl QuasiorthogonalFamily {
    pub fn is_basis(&self) -> bool {
        self.index == BigInt::from(1)
    }
}

pub fn quasiorthogonal_family(l: &NormedLattice) -> Result<QuasiorthogonalFamily, LatticeError> {
    let profile = successive_minima(l)?;
    let index = witness_index(&profile.witnesses)?;
    Ok(QuasiorthogonalFamily { profile, index })
}

/// `|det|` of the coefficient matrix of the witnesses.
pub fn witness_index(witnesses: &[Vec<i64>]) -> Result<BigInt, LatticeError> {
    let rows: Vec<Vec<Rational>> =
        witnesses.iter().map(|z| z.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect();
    let det = RatMatrix::from_rows(rows)?.determinant()?;
    Ok(det.abs().to_integer())
}

#[derive(Clone, Debug)]
pub struct TransferenceProfile {
    pub rank: usize,
    pub primal: MinimaProfile,
    pub dual: MinimaProfile,
    /// `lambda_i(L) lambda_{b-i+1}(L*)`.
    pub products: Vec<NormValue>,
    /// `b (1 + ln b)`.
    pub normalizer: f64,
    pub ratios: Vec<f64>,
    /// `lambda_1(L) Lambda(L*)`.
    pub first_times_last: NormValue,
}

impl TransferenceProfile {
    pub fn all_at_least_one(&self) -> bool {
        self.products.iter().all(|p| match p.square() {
            Some(s) => s >= Rational::from_integer(1.into()),
            None => p.upper() >= 1.0 - 1e-9,
        })
    }

    pub fn all_equal_one(&self) -> bool {
        self.products.iter().all(|p| p.square().is_some_and(|s| s == Rational::from_integer(1.into())))
    }

    pub fn report(&self) -> TransferenceReport {
        TransferenceReport {
            rank: self.rank,
            products: self.products.iter().map(NormValue::report).collect(),
            normalizer: self.normalizer,
            ratios: self.ratios.clone(),
            first_times_last: self.first_times_last.report(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferenceReport {
    pub rank: usize,
    pub products: Vec<ValueReport>,
    pub normalizer: f64,
    pub ratios: Vec<f64>,
    pub first_times_last: ValueReport,
}

pub fn transference_profile(l: &NormedLattice) -> Result<TransferenceProfile, LatticeError> {
    let primal = successive_minima(l)?;
    let dual = successive_minima(&l.dual()?)?;
    let b = l.rank();
    let products: Vec<NormValue> = (0..b).map(|i| primal.lambdas[i].mul(&dual.lambdas[b - 1 - i])).collect();
    let normalizer = b as f64 * (1.0 + (b as f64).ln());
    let ratios = products.iter().map(|p| p.to_f64() / normalizer).collect();
    let first_times_last = primal.lambdas[0].mul(dual.last());
    Ok(TransferenceProfile { rank: b, primal, dual, products, normalizer, ratios, first_times_last })
}

/// Brute-force successive minima over the box `|z_i| <= bound`; test oracle.
pub fn minima_by_box(l: &NormedLattice, bound: i64) -> Vec<NormValue> {
    let b = l.rank();
    let mut pts = Vec::new();
    let mut z = vec![-bound; b];
    loop {
        if z.iter().any(|&x| x != 0) {
            pts.push((l.norm().norm(&l.vector(&z)), z.clone()));
        }
        let mut i = 0;
        while i < b {
            z[i] += 1;
            if z[i] <= bound {
                break;
            }
            z[i] = -bound;
            i += 1;
        }
        if i == b {
            break;
        }
    }
    pts.sort_by(|a, b| a.0.cmp_value(&b.0));
    let mut span = Subspace::zero(b);
    let mut out = Vec::new();
    for (n, z) in pts {
        let zr: Vec<Rational> = z.iter().map(|&x| Rational::from_integer(x.into())).collect();
        if !span.contains(&zr).expect("dimension") {
            span = span.sum(&Subspace::span(b, &[zr]).expect("dimension")).expect("dimension");
            out.push(n);
        }
        if out.len() == b {
            break;
        }
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn diag(entries: &[i64]) -> RatMatrix {
        let n = entries.len();
        RatMatrix::from_fn(n, n, |i, j| if i == j { rat(entries[i]) } else { rat(0) })
    }

    #[test]
    fn standard_lattices() {
        let p = successive_minima(&NormedLattice::standard(NormOracle::euclidean(2))).unwrap();
        assert_eq!(p.lambdas, vec![NormValue::Exact(rat(1)), NormValue::Exact(rat(1))]);
        assert_eq!(p.witnesses, vec![vec![0, 1], vec![1, 0]]);
        let l = NormedLattice::new(diag(&[1, 5]), NormOracle::euclidean(2)).unwrap();
        let p = successive_minima(&l).unwrap();
        assert_eq!(p.lambdas, vec![NormValue::Exact(rat(1)), NormValue::Exact(rat(5))]);
        for n in [NormOracle::l1(2), NormOracle::linf(2)] {
            let p = successive_minima(&NormedLattice::standard(n)).unwrap();
            assert_eq!(p.lambdas, vec![NormValue::Exact(rat(1)), NormValue::Exact(rat(1))]);
        }
    }

    #[test]
    fn dual_of_diagonal() {
        let l = NormedLattice::new(diag(&[1, 5]), NormOracle::euclidean(2)).unwrap();
        let d = l.dual().unwrap();
        assert_eq!(d.basis().get(1, 1), &ratio(1, 5));
        assert_eq!(d.dual().unwrap().basis(), l.basis());
        let t = transference_profile(&l).unwrap();
        assert!(t.all_equal_one());
    }

    #[test]
    fn degenerate_rejected() {
        let b = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(matches!(NormedLattice::new(b, NormOracle::euclidean(2)), Err(LatticeError::Degenerate { .. })));
    }

    #[test]
    fn skewed_basis_matches_box() {
        // a unimodular change of basis of Z^3
        let b = RatMatrix::from_i64(&[&[1, 0, 0], &[7, 1, 0], &[3, 5, 1]]);
        let l = NormedLattice::new(b, NormOracle::euclidean(3)).unwrap();
        let p = successive_minima(&l).unwrap();
        assert!(p.lambdas.iter().all(|x| *x == NormValue::Exact(rat(1))));
        let b = RatMatrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let l = NormedLattice::new(b, NormOracle::euclidean(3)).unwrap();
        let p = successive_minima(&l).unwrap();
        assert_eq!(p.lambdas, minima_by_box(&l, 6));
    }
}
