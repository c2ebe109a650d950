use num_traits::Zero;

use crate::error::LinalgError;
use crate::linalg::{axpy, RatMatrix};
use crate::rational::Rational;

/// A linear subspace of `Q^n` stored by its reduced echelon basis, so two
/// subspaces are equal exactly when their stored bases are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![Rational::zero(); ambient];
                v[i] = num_traits::One::one();
                v
            })
            .collect();
        Self { ambient, basis, pivots: (0..ambient).collect() }
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(ambient: usize, vectors: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        for v in vectors {
            if v.len() != ambient {
                return Err(LinalgError::DimensionMismatch { expected: ambient, found: v.len() });
            }
        }
        if vectors.is_empty() {
            return Ok(Self::zero(ambient));
        }
        let rref = RatMatrix::from_rows(vectors.to_vec())?.rref();
        let basis = (0..rref.rank).map(|i| rref.matrix.row(i).to_vec()).collect();
        Ok(Self { ambient, basis, pivots: rref.pivots })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Canonical (reduced echelon) basis.
    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check(&self, len: usize) -> Result<(), LinalgError> {
        if len != self.ambient {
            return Err(LinalgError::DimensionMismatch { expected: self.ambient, found: len });
        }
        Ok(())
    }

    /// `v` minus its component along the pivot columns; zero iff `v` is in the subspace.
    pub fn reduce(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        self.check(v.len())?;
        let mut r = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let c = -r[p].clone();
            axpy(&mut r, &c, row);
        }
        Ok(r)
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool, LinalgError> {
        Ok(self.reduce(v)?.iter().all(Zero::is_zero))
    }

    /// Coordinates of `v` in the canonical basis, or `None` when `v` is not in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Result<Option<Vec<Rational>>, LinalgError> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&p| v[p].clone()).collect()))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(other.ambient)?;
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &all)
    }

    /// Intersection by the Zassenhaus algorithm.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(other.ambient)?;
        let n = self.ambient;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(n));
        }
        let mut rows = Vec::new();
        for a in &self.basis {
            let mut r = a.clone();
            r.extend(a.iter().cloned());
            rows.push(r);
        }
        for b in &other.basis {
            let mut r = b.clone();
            r.extend(std::iter::repeat_n(Rational::zero(), n));
            rows.push(r);
        }
        let rref = RatMatrix::from_rows(rows)?.rref();
        let meet: Vec<Vec<Rational>> = (0..rref.rank)
            .map(|i| rref.matrix.row(i))
            .filter(|r| r[..n].iter().all(Zero::is_zero))
            .map(|r| r[n..].to_vec())
            .collect();
        Subspace::span(n, &meet)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check(other.ambient)?;
        for v in &self.basis {
            if !other.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `dim(self / sub)`; errors unless `sub` is contained in `self`.
    pub fn quotient_dim(&self, sub: &Subspace) -> Result<usize, LinalgError> {
        if !sub.is_subspace_of(self)? {
            return Err(LinalgError::DimensionMismatch { expected: self.dim(), found: sub.dim() });
        }
        Ok(self.dim() - sub.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn e(n: usize, i: usize) -> Vec<Rational> {
        let mut v = vec![rat(0); n];
        v[i] = rat(1);
        v
    }

    #[test]
    fn sum_of_axes() {
        let a = Subspace::span(3, &[e(3, 0)]).unwrap();
        let b = Subspace::span(3, &[e(3, 1)]).unwrap();
        assert_eq!(a.sum(&b).unwrap(), Subspace::span(3, &[e(3, 0), e(3, 1)]).unwrap());
    }

    #[test]
    fn intersection_with_containing_plane() {
        let diag = vec![rat(1), rat(1), rat(0)];
        let a = Subspace::span(3, std::slice::from_ref(&diag)).unwrap();
        let b = Subspace::span(3, &[e(3, 0), e(3, 1)]).unwrap();
        assert_eq!(a.intersection(&b).unwrap(), a);
        assert_eq!(b.intersection(&a).unwrap(), a);
    }

    #[test]
    fn canonical_equality() {
        let a = Subspace::span(2, &[vec![rat(2), rat(4)]]).unwrap();
        let b = Subspace::span(2, &[vec![rat(-1), rat(-2)], vec![rat(3), rat(6)]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 1);
    }

    #[test]
    fn membership_and_coordinates() {
        let s = Subspace::span(3, &[vec![rat(1), rat(2), rat(3)], vec![rat(0), rat(1), rat(1)]]).unwrap();
        let v = vec![rat(2), rat(5), rat(7)];
        assert!(s.contains(&v).unwrap());
        let c = s.coordinates(&v).unwrap().unwrap();
        let mut rebuilt = vec![rat(0); 3];
        for (ci, b) in c.iter().zip(s.basis()) {
            axpy(&mut rebuilt, ci, b);
        }
        assert_eq!(rebuilt, v);
        assert!(!s.contains(&e(3, 2)).unwrap());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = Subspace::zero(2);
        let b = Subspace::zero(3);
        assert!(a.sum(&b).is_err());
        assert!(a.intersection(&b).is_err());
        assert!(a.contains(&e(3, 0)).is_err());
    }

    #[test]
    fn quotient_dimension() {
        let big = Subspace::full(3);
        let small = Subspace::span(3, &[e(3, 1)]).unwrap();
        assert_eq!(big.quotient_dim(&small).unwrap(), 2);
        assert!(small.quotient_dim(&big).is_err());
    }
}
