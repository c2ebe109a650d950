use nalgebra::DMatrix;
use num_traits::{Signed, Zero};

use crate::dga::exterior::{indices, ExteriorBasis};
use crate::error::GeometryError;
use crate::linalg::RatMatrix;
use crate::rational::{format_rational, to_f64, Rational};

/// Left-invariant metric given by its Gram matrix on the frame `e_1..e_n`.
/// Forms are measured in the dual coframe, so the metric on 1-forms is the
/// inverse Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantMetric {
    gram: RatMatrix,
    inverse: RatMatrix,
}

impl InvariantMetric {
    pub fn new(gram: RatMatrix) -> Result<Self, GeometryError> {
        let n = gram.rows();
        if !gram.is_square() {
            return Err(GeometryError::MetricShape { expected: n, found: gram.cols() });
        }
        if !gram.is_symmetric() {
            return Err(GeometryError::NotPositiveDefinite { index: 0, value: "asymmetric".into() });
        }
        for k in 1..=n {
            let idx: Vec<usize> = (0..k).collect();
            let minor = gram.select(&idx, &idx).determinant().map_err(crate::error::ModelError::from)?;
            if !minor.is_positive() {
                return Err(GeometryError::NotPositiveDefinite { index: k, value: format_rational(&minor) });
            }
        }
        let inverse = gram.inverse().map_err(crate::error::ModelError::from)?;
        Ok(Self { gram, inverse })
    }

    pub fn identity(n: usize) -> Self {
        Self { gram: RatMatrix::identity(n), inverse: RatMatrix::identity(n) }
    }

    pub fn diagonal(d: &[Rational]) -> Result<Self, GeometryError> {
        let n = d.len();
        Self::new(RatMatrix::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { Rational::zero() }))
    }

    /// The metric `c * g` (so lengths scale by `sqrt(c)`).
    pub fn scaled(&self, c: &Rational) -> Result<Self, GeometryError> {
        Self::new(self.gram.scale(c))
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn inverse(&self) -> &RatMatrix {
        &self.inverse
    }

    pub fn determinant(&self) -> Rational {
        self.gram.determinant().expect("square")
    }

    /// Inner product on `k`-forms: entry `(I, J)` is `det(G^{-1}[I, J])`.
    pub fn form_gram(&self, k: usize) -> RatMatrix {
        let basis = ExteriorBasis::new(self.dim());
        let idx: Vec<Vec<usize>> = basis.masks(k).iter().map(|&m| indices(m)).collect();
        let n = idx.len();
        let mut out = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = if k == 0 {
                    Rational::from_integer(1.into())
                } else {
                    self.inverse.select(&idx[i], &idx[j]).determinant().expect("square")
                };
                out.set(j, i, v.clone());
                out.set(i, j, v);
            }
        }
        out
    }

    /// `M` with `M^T G M = I`: column `a` holds the frame coordinates of the
    /// `a`-th orthonormal vector.
    pub fn orthonormal_frame(&self) -> DMatrix<f64> {
        let n = self.dim();
        let g = DMatrix::from_fn(n, n, |i, j| to_f64(self.gram.get(i, j)));
        let l = g.cholesky().expect("positive definite").l();
        l.try_inverse().expect("invertible").transpose()
    }
}

/// Determinant of a small dense matrix by partial pivoting.
pub(crate) fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).expect("nonempty");
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}
