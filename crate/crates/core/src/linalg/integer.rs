use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::LinalgError;
use crate::linalg::RatMatrix;
use crate::rational::Rational;

/// Dense row-major matrix over arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::Ragged { row: i, len: r.len(), expected: cols });
            }
            data.extend(r);
        }
        Ok(Self { rows: n, cols, data })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let v = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::from_rows(v, cols).expect("ragged literal matrix")
    }

    /// Converts a rational matrix whose entries are all integers.
    pub fn from_rational(m: &RatMatrix) -> Option<Self> {
        let mut data = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for x in m.row(i) {
                if !x.is_integer() {
                    return None;
                }
                data.push(x.to_integer());
            }
        }
        Some(Self { rows: m.rows(), cols: m.cols(), data })
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix::from_fn(self.rows, self.cols, |i, j| Rational::from_integer(self.get(i, j).clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        Ok(self.to_rational().determinant()?.to_integer())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * f;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * f;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[r * self.cols + j]);
            self.data[r * self.cols + j] = v;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal with
/// nonnegative entries forming a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, tracked during the reduction.
    pub v_inv: IntMatrix,
    /// Inverse of `u`, tracked during the reduction.
    pub u_inv: IntMatrix,
}

impl SmithDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// Invariant factors greater than one, i.e. the torsion of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|x| x > &BigInt::one()).collect()
    }

    /// Basis of the integer kernel `{x in Z^n : M x = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank()..self.v.cols()).map(|j| self.v.column(j)).collect()
    }

    /// Basis of the row lattice of `M` (rows of `D V^{-1}` with nonzero diagonal).
    pub fn row_lattice_basis(&self) -> Vec<Vec<BigInt>> {
        let diag = self.diagonal();
        (0..self.rank()).map(|i| self.v_inv.row(i).iter().map(|x| x * &diag[i]).collect()).collect()
    }

    /// An integer solution of `M x = b`, if one exists.
    pub fn solve(&self, b: &[BigInt]) -> Result<Option<Vec<BigInt>>, LinalgError> {
        let ub = self.u.mul_vec(b)?;
        let diag = self.diagonal();
        let r = self.rank();
        let mut y = vec![BigInt::zero(); self.v.cols()];
        for i in 0..ub.len() {
            if i < r {
                let (q, rem) = ub[i].div_rem(&diag[i]);
                if !rem.is_zero() {
                    return Ok(None);
                }
                y[i] = q;
            } else if !ub[i].is_zero() {
                return Ok(None);
            }
        }
        Ok(Some(self.v.mul_vec(&y)?))
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// Returns `(basis, transform)`: the nonzero rows of the echelon form (positive
/// pivots, entries above each pivot reduced into `[0, pivot)`) and, for each of
/// them, its integer coefficients over the input rows.
pub fn hermite_rows(rows: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let g = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut t: Vec<Vec<BigInt>> = (0..g)
        .map(|i| (0..g).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let sub = |v: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        let s = v[src].clone();
        for (x, y) in v[dst].iter_mut().zip(&s) {
            *x -= q * y;
        }
    };
    let mut r = 0;
    for c in 0..cols {
        if r == g {
            break;
        }
        loop {
            let best = (r..g).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].abs());
            let Some(p) = best else { break };
            a.swap(r, p);
            t.swap(r, p);
            let mut done = true;
            for i in r + 1..g {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                sub(&mut a, i, r, &q);
                sub(&mut t, i, r, &q);
                done &= a[i][c].is_zero();
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            a[r].iter_mut().for_each(|x| *x = -std::mem::take(x));
            t[r].iter_mut().for_each(|x| *x = -std::mem::take(x));
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if !q.is_zero() {
                sub(&mut a, i, r, &q);
                sub(&mut t, i, r, &q);
            }
        }
        r += 1;
    }
    a.truncate(r);
    t.truncate(r);
    (a, t)
}

/// Smith normal form with minimal-absolute-value pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    // Row operation E applied as A <- E A, U <- E U, U^{-1} <- U^{-1} E^{-1}.
    let add_row = |a: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, dst: usize, src: usize, f: &BigInt| {
        a.add_row(dst, src, f);
        u.add_row(dst, src, f);
        u_inv.add_col(src, dst, &-f);
    };
    let add_col = |a: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, dst: usize, src: usize, f: &BigInt| {
        a.add_col(dst, src, f);
        v.add_col(dst, src, f);
        v_inv.add_row(src, dst, &-f);
    };

    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry of the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = a.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        v_inv.swap_rows(t, pj);

        let mut dirty = false;
        for i in t + 1..rows {
            let q = a.get(i, t).div_floor(a.get(t, t));
            add_row(&mut a, &mut u, &mut u_inv, i, t, &-q);
            dirty |= !a.get(i, t).is_zero();
        }
        for j in t + 1..cols {
            let q = a.get(t, j).div_floor(a.get(t, t));
            add_col(&mut a, &mut v, &mut v_inv, j, t, &-q);
            dirty |= !a.get(t, j).is_zero();
        }
        if dirty {
            // A smaller remainder appeared; pivot again on the same block.
            continue;
        }
        // Divisibility: fold any offending row into row t and retry.
        let p = a.get(t, t).clone();
        let offending = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&p)));
        if let Some(i) = offending {
            add_row(&mut a, &mut u, &mut u_inv, t, i, &BigInt::one());
            continue;
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
            // (-1) row op is its own inverse: negate the matching column of U^{-1}.
            for r in 0..rows {
                let x = -std::mem::take(&mut u_inv.data[r * rows + t]);
                u_inv.data[r * rows + t] = x;
            }
        }
        t += 1;
    }
    SmithDecomposition { u, d: a, v, v_inv, u_inv }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> SmithDecomposition {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).unwrap().mul(&s.v).unwrap(), s.d);
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(m.rows()));
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(m.cols()));
        assert!(s.u.determinant().unwrap().abs().is_one());
        assert!(s.v.determinant().unwrap().abs().is_one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if !w[0].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]), "{diag:?}");
            } else {
                assert!(w[1].is_zero());
            }
        }
        s
    }

    #[test]
    fn identity_is_its_own_form() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
    }

    #[test]
    fn rank_one_two_by_two() {
        let s = check(&IntMatrix::from_i64(&[&[2, 4], &[4, 8]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(0)]);
    }

    #[test]
    fn diagonal_input_reports_torsion() {
        let s = check(&IntMatrix::from_i64(&[&[1, 0], &[0, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(3)]);
        assert_eq!(s.torsion(), vec![BigInt::from(3)]);
    }

    #[test]
    fn needs_divisibility_fix() {
        let s = check(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn hermite_basis_and_transform() {
        let rows: Vec<Vec<BigInt>> =
            [[2, 4], [1, 3], [3, 7]].iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let (basis, t) = hermite_rows(&rows);
        assert_eq!(basis, vec![vec![BigInt::from(1), BigInt::from(1)], vec![BigInt::from(0), BigInt::from(2)]]);
        for (b, coeffs) in basis.iter().zip(&t) {
            let mut comb = vec![BigInt::zero(); 2];
            for (c, r) in coeffs.iter().zip(&rows) {
                for (x, y) in comb.iter_mut().zip(r) {
                    *x += c * y;
                }
            }
            assert_eq!(&comb, b);
        }
    }

    #[test]
    fn kernel_and_solve() {
        let m = IntMatrix::from_i64(&[&[2, 4, 6], &[1, 1, 1]]);
        let s = check(&m);
        for k in s.kernel_basis() {
            assert!(m.mul_vec(&k).unwrap().iter().all(Zero::is_zero));
        }
        let b = vec![BigInt::from(4), BigInt::from(1)];
        let x = s.solve(&b).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), b);
        assert!(s.solve(&[BigInt::from(1), BigInt::from(0)]).unwrap().is_none());
    }

    #[test]
    fn empty_and_zero_matrices() {
        let s = check(&IntMatrix::zeros(2, 3));
        assert_eq!(s.rank(), 0);
        assert_eq!(s.kernel_basis().len(), 3);
        let e = smith_normal_form(&IntMatrix::zeros(0, 2));
        assert_eq!(e.kernel_basis().len(), 2);
    }
}
