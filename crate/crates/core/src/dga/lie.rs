use num_traits::{One, Zero};
use serde::Serialize;

use crate::dga::exterior::{indices, monomial_wedge, ExteriorBasis};
use crate::dga::model::{CochainModel, Origin, ProductTable};
use crate::error::ModelError;
use crate::linalg::{RatMatrix, Subspace};
use crate::rational::{format_rational, rat, Rational};

/// Structure constants `[e_i, e_j] = sum_k c^k_{ij} e_k` of a finite-dimensional
/// real Lie algebra with rational constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieStructure {
    dim: usize,
    /// `c[i][j][k] = c^k_{ij}`.
    c: Vec<Vec<Vec<Rational>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: String,
}

impl LieStructure {
    /// Builds from entries `(i, j, k, c^k_{ij})` (0-based) with `i < j`;
    /// the `(j, i)` entries are filled by antisymmetry.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, Rational)]) -> Result<Self, ModelError> {
        let mut c = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        for (i, j, k, v) in entries {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim {
                return Err(ModelError::Invalid(format!("structure constant index ({i},{j},{k}) out of range")));
            }
            if i == j {
                if !v.is_zero() {
                    return Err(ModelError::NotAntisymmetric { i, j, k });
                }
                continue;
            }
            let existing = &c[i][j][k];
            if !existing.is_zero() && existing != v {
                return Err(ModelError::NotAntisymmetric { i, j, k });
            }
            c[i][j][k] = v.clone();
            c[j][i][k] = -v.clone();
        }
        let lie = Self { dim, c };
        lie.check_jacobi()?;
        Ok(lie)
    }

    pub fn abelian(dim: usize) -> Self {
        Self { dim, c: vec![vec![vec![Rational::zero(); dim]; dim]; dim] }
    }

    /// Three-dimensional Heisenberg algebra `[e1, e2] = e3`.
    pub fn heisenberg() -> Self {
        Self::from_entries(3, &[(0, 1, 2, rat(1))]).expect("Heisenberg algebra satisfies Jacobi")
    }

    /// Direct sum: generators of `other` are appended after those of `self`.
    pub fn direct_sum(&self, other: &LieStructure) -> LieStructure {
        let n = self.dim + other.dim;
        let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    c[i][j][k] = self.c[i][j][k].clone();
                }
            }
        }
        let o = self.dim;
        for i in 0..other.dim {
            for j in 0..other.dim {
                for k in 0..other.dim {
                    c[o + i][o + j][o + k] = other.c[i][j][k].clone();
                }
            }
        }
        LieStructure { dim: n, c }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    /// Nonzero constants with `i < j`.
    pub fn entries(&self) -> Vec<StructureConstant> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in 0..self.dim {
                    if !self.c[i][j][k].is_zero() {
                        out.push(StructureConstant { i, j, k, value: format_rational(&self.c[i][j][k]) });
                    }
                }
            }
        }
        out
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let s = xi * yj;
                for (k, o) in out.iter_mut().enumerate() {
                    let ck = &self.c[i][j][k];
                    if !ck.is_zero() {
                        *o += &s * ck;
                    }
                }
            }
        }
        out
    }

    fn check_jacobi(&self) -> Result<(), ModelError> {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                for l in j + 1..n {
                    for m in 0..n {
                        let mut s = Rational::zero();
                        for p in 0..n {
                            s += &self.c[i][j][p] * &self.c[p][l][m];
                            s += &self.c[j][l][p] * &self.c[p][i][m];
                            s += &self.c[l][i][p] * &self.c[p][j][m];
                        }
                        if !s.is_zero() {
                            return Err(ModelError::Jacobi { i, j, k: l });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Dimensions of the lower central series `g, [g,g], [g,[g,g]], ...`,
    /// stopping once it stabilizes.
    pub fn lower_central_series(&self) -> Vec<usize> {
        let unit = |i: usize| {
            let mut v = vec![Rational::zero(); self.dim];
            v[i] = Rational::one();
            v
        };
        let mut current = Subspace::full(self.dim);
        let mut dims = vec![self.dim];
        loop {
            let mut gens = Vec::new();
            for i in 0..self.dim {
                for b in current.basis() {
                    gens.push(self.bracket(&unit(i), b));
                }
            }
            let next = Subspace::span(self.dim, &gens).expect("bracket has algebra dimension");
            if next.dim() == current.dim() {
                break;
            }
            dims.push(next.dim());
            current = next;
            if current.is_zero() {
                break;
            }
        }
        dims
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last() == Some(&0) || self.dim == 0
    }

    /// `sum_k c^k_{ik}` for each `i`; all zero for unimodular algebras.
    pub fn is_unimodular(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).map(|k| &self.c[i][k][k]).sum::<Rational>().is_zero())
    }
}

/// Chevalley-Eilenberg complex: exterior algebra on `e^1..e^n` with
/// `d e^k = - sum_{i<j} c^k_{ij} e^i ^ e^j`, extended as a graded derivation.
pub fn build_chevalley_eilenberg(lie: &LieStructure, name: &str) -> Result<CochainModel, ModelError> {
    lie.check_jacobi()?;
    let n = lie.dim();
    let basis = ExteriorBasis::new(n);

    // d on generators as (coefficient, mask) lists
    let mut d_gen: Vec<Vec<(Rational, u32)>> = vec![Vec::new(); n];
    for (k, dk) in d_gen.iter_mut().enumerate() {
        for i in 0..n {
            for j in i + 1..n {
                let c = lie.constant(i, j, k);
                if !c.is_zero() {
                    dk.push((-c.clone(), (1 << i) | (1 << j)));
                }
            }
        }
    }

    let mut d = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let rows = if k < n { basis.dim(k + 1) } else { 0 };
        let mut m = RatMatrix::zeros(rows, basis.dim(k));
        if k < n {
            for (col, &mask) in basis.masks(k).iter().enumerate() {
                let idx = indices(mask);
                for (s, &g) in idx.iter().enumerate() {
                    let sign = if s % 2 == 0 { Rational::one() } else { -Rational::one() };
                    let left: u32 = idx[..s].iter().fold(0, |a, &i| a | (1 << i));
                    let right: u32 = idx[s + 1..].iter().fold(0, |a, &i| a | (1 << i));
                    for (c, dm) in &d_gen[g] {
                        let Some((s1, lm)) = monomial_wedge(left, *dm) else { continue };
                        let Some((s2, full)) = monomial_wedge(lm, right) else { continue };
                        let row = basis.position(full);
                        let v = m.get(row, col) + &sign * c * rat((s1 * s2) as i64);
                        m.set(row, col, v);
                    }
                }
            }
        }
        d.push(m);
    }

    let mut products = ProductTable::new();
    for k in 0..=n {
        for l in 0..=n - k {
            let mut table = Vec::with_capacity(basis.dim(k) * basis.dim(l));
            for &a in basis.masks(k) {
                for &b in basis.masks(l) {
                    table.push(match monomial_wedge(a, b) {
                        Some((s, m)) => vec![(basis.position(m), rat(s as i64))],
                        None => Vec::new(),
                    });
                }
            }
            products.insert((k, l), table);
        }
    }

    let labels = (0..=n).map(|k| basis.masks(k).iter().map(|&m| basis.label(m)).collect()).collect();
    CochainModel::new(name, labels, d, products, None, true, Origin::Lie(lie.clone()))
}
