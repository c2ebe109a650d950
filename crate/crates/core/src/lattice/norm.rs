use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::LatticeError;
use crate::lattice::polytope::polar_normals;
use crate::linalg::{dot, RatMatrix};
use crate::rational::{format_rational, to_f64, Rational};

/// A norm value: exact rational, exact square root of a rational, or a
/// certified bracket.
#[derive(Clone, Debug, PartialEq)]
pub enum NormValue {
    Exact(Rational),
    /// `sqrt(r)` with `r >= 0`.
    Sqrt(Rational),
    Interval { lo: f64, hi: f64 },
}

impl NormValue {
    pub fn zero() -> Self {
        NormValue::Exact(Rational::zero())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            NormValue::Exact(q) => to_f64(q),
            NormValue::Sqrt(r) => to_f64(r).sqrt(),
            NormValue::Interval { lo, hi } => 0.5 * (lo + hi),
        }
    }

    pub fn lower(&self) -> f64 {
        match self {
            NormValue::Interval { lo, .. } => *lo,
            v => v.to_f64(),
        }
    }

    pub fn upper(&self) -> f64 {
        match self {
            NormValue::Interval { hi, .. } => *hi,
            v => v.to_f64(),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, NormValue::Interval { .. })
    }

    /// Exact square when the value is exact.
    pub fn square(&self) -> Option<Rational> {
        match self {
            NormValue::Exact(q) => Some(q * q),
            NormValue::Sqrt(r) => Some(r.clone()),
            NormValue::Interval { .. } => None,
        }
    }

    /// Exact comparison when both sides are exact, midpoint comparison otherwise.
    pub fn cmp_value(&self, other: &NormValue) -> Ordering {
        match (self.square(), other.square()) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }

    pub fn mul(&self, other: &NormValue) -> NormValue {
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => NormValue::Exact(a * b),
            (NormValue::Interval { .. }, _) | (_, NormValue::Interval { .. }) => {
                NormValue::Interval { lo: self.lower() * other.lower(), hi: self.upper() * other.upper() }
            }
            (a, b) => {
                let s = a.square().expect("exact") * b.square().expect("exact");
                match perfect_square(&s) {
                    Some(q) => NormValue::Exact(q),
                    None => NormValue::Sqrt(s),
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> NormValue {
        let c = c.abs();
        match self {
            NormValue::Exact(q) => NormValue::Exact(q * c),
            NormValue::Sqrt(r) => NormValue::Sqrt(r * &c * &c),
            NormValue::Interval { lo, hi } => {
                let f = to_f64(&c);
                NormValue::Interval { lo: lo * f, hi: hi * f }
            }
        }
    }

    /// Normalized form: `Sqrt` of a perfect square becomes `Exact`.
    pub fn normalized(self) -> NormValue {
        match self {
            NormValue::Sqrt(r) => match perfect_square(&r) {
                Some(q) => NormValue::Exact(q),
                None => NormValue::Sqrt(r),
            },
            v => v,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            NormValue::Exact(q) => format_rational(q),
            NormValue::Sqrt(r) => format!("sqrt({})", format_rational(r)),
            NormValue::Interval { lo, hi } => format!("[{lo:.12e}, {hi:.12e}]"),
        }
    }

    pub fn report(&self) -> ValueReport {
        ValueReport {
            value: self.to_f64(),
            lower: self.lower(),
            upper: self.upper(),
            exact: self.is_exact().then(|| self.describe()),
        }
    }
}

/// Serializable view of a value: midpoint, bracket and exact form when known.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueReport {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<String>,
}

impl ValueReport {
    pub fn from_bracket(lo: f64, hi: f64) -> Self {
        Self { value: 0.5 * (lo + hi), lower: lo, upper: hi, exact: None }
    }
}

impl fmt::Display for NormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Rational square root when `r` is a perfect square of a rational.
pub fn perfect_square(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// Externally evaluated norm: returns a bracket `[lo, hi]` for `||x||`.
pub type ExternalEval = Arc<dyn Fn(&[f64]) -> (f64, f64) + Send + Sync>;

#[derive(Clone)]
pub enum NormKind {
    /// `||x|| = sqrt(x^T G x)`.
    Quadratic { gram: RatMatrix },
    /// `||x|| = max_f |f . x|` over the facet normals `f`.
    Polyhedral { facets: Vec<Vec<Rational>> },
    External { eval: ExternalEval, label: String },
}

impl fmt::Debug for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::Quadratic { gram } => f.debug_struct("Quadratic").field("gram", gram).finish(),
            NormKind::Polyhedral { facets } => f.debug_struct("Polyhedral").field("facets", facets).finish(),
            NormKind::External { label, .. } => f.debug_struct("External").field("label", label).finish(),
        }
    }
}

/// A norm on `R^dim` with a quadratic lower bound `||x|| >= sqrt(x^T Q x)`.
#[derive(Clone, Debug)]
pub struct NormOracle {
    dim: usize,
    kind: NormKind,
    lower_gram: RatMatrix,
}

fn check_positive_definite(g: &RatMatrix) -> Result<(), LatticeError> {
    if !g.is_square() || !g.is_symmetric() {
        return Err(LatticeError::InvalidNorm("Gram matrix must be square and symmetric".into()));
    }
    for k in 1..=g.rows() {
        let idx: Vec<usize> = (0..k).collect();
        if !g.select(&idx, &idx).determinant()?.is_positive() {
            return Err(LatticeError::InvalidNorm(format!("Gram matrix leading minor {k} is not positive")));
        }
    }
    Ok(())
}

impl NormOracle {
    pub fn quadratic(gram: RatMatrix) -> Result<Self, LatticeError> {
        check_positive_definite(&gram)?;
        Ok(Self { dim: gram.rows(), lower_gram: gram.clone(), kind: NormKind::Quadratic { gram } })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::quadratic(RatMatrix::identity(dim)).expect("identity is positive definite")
    }

    /// `||x|| = max_f |f . x|`; the facets must span the dual space.
    pub fn polyhedral(facets: Vec<Vec<Rational>>) -> Result<Self, LatticeError> {
        let dim = facets.first().map_or(0, Vec::len);
        if facets.iter().any(|f| f.len() != dim) || dim == 0 {
            return Err(LatticeError::InvalidNorm("facet normals must be nonempty and of equal length".into()));
        }
        let m = RatMatrix::from_rows(facets.clone())?;
        if m.rank() != dim {
            return Err(LatticeError::InvalidNorm("facet normals do not span; the unit ball is unbounded".into()));
        }
        // ||x||^2 >= mean_f (f . x)^2
        let n = Rational::from_integer(facets.len().into());
        let lower_gram = m.transpose().mul(&m)?.scale(&(Rational::one() / n));
        Ok(Self { dim, kind: NormKind::Polyhedral { facets: dedup_sign(facets) }, lower_gram })
    }

    /// Gauge of `conv(+-vertices)`.
    pub fn from_vertices(vertices: &[Vec<Rational>]) -> Result<Self, LatticeError> {
        let facets = polar_normals(vertices)?;
        Self::polyhedral(facets)
    }

    pub fn l1(dim: usize) -> Self {
        // facets of the cross-polytope: all sign vectors (up to overall sign)
        let mut facets = Vec::new();
        for mask in 0..(1u32 << dim.saturating_sub(1)) {
            let mut f = vec![Rational::one(); dim];
            for (i, x) in f.iter_mut().enumerate().skip(1) {
                if mask & (1 << (i - 1)) != 0 {
                    *x = -Rational::one();
                }
            }
            facets.push(f);
        }
        Self::polyhedral(facets).expect("sign vectors span")
    }

    pub fn linf(dim: usize) -> Self {
        let facets = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Self::polyhedral(facets).expect("unit vectors span")
    }

    /// External norm with a mandatory quadratic lower bound, spot-checked on
    /// seeded random vectors.
    pub fn external(dim: usize, eval: ExternalEval, lower_gram: RatMatrix, label: impl Into<String>) -> Result<Self, LatticeError> {
        check_positive_definite(&lower_gram)?;
        if lower_gram.rows() != dim {
            return Err(LatticeError::InvalidNorm("lower-bound Gram has the wrong size".into()));
        }
        let oracle = Self { dim, kind: NormKind::External { eval, label: label.into() }, lower_gram };
        oracle.spot_check(32, 0x5eed)?;
        Ok(oracle)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn lower_gram(&self) -> &RatMatrix {
        &self.lower_gram
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, NormKind::External { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            NormKind::Quadratic { .. } => "quadratic",
            NormKind::Polyhedral { .. } => "polyhedral",
            NormKind::External { .. } => "external",
        }
    }

    pub fn norm(&self, x: &[Rational]) -> NormValue {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            NormKind::Quadratic { gram } => {
                let gx = gram.mul_vec(x).expect("dimension checked");
                NormValue::Sqrt(dot(x, &gx)).normalized()
            }
            NormKind::Polyhedral { facets } => {
                NormValue::Exact(facets.iter().map(|f| dot(f, x).abs()).max().unwrap_or_else(Rational::zero))
            }
            NormKind::External { eval, .. } => {
                let xf: Vec<f64> = x.iter().map(to_f64).collect();
                let (lo, hi) = eval(&xf);
                NormValue::Interval { lo, hi }
            }
        }
    }

    /// Floating-point evaluation (midpoint for external norms).
    pub fn norm_f64(&self, x: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Quadratic { gram } => {
                let g = gram.to_f64();
                let mut s = 0.0;
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        s += x[i] * g[i][j] * x[j];
                    }
                }
                s.max(0.0).sqrt()
            }
            NormKind::Polyhedral { facets } => facets
                .iter()
                .map(|f| f.iter().zip(x).map(|(a, b)| to_f64(a) * b).sum::<f64>().abs())
                .fold(0.0, f64::max),
            NormKind::External { eval, .. } => {
                let (lo, hi) = eval(x);
                0.5 * (lo + hi)
            }
        }
    }

    fn lower_bound_f64(&self, x: &[f64]) -> f64 {
        let g = self.lower_gram.to_f64();
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += x[i] * g[i][j] * x[j];
            }
        }
        s.max(0.0).sqrt()
    }

    /// Positivity, homogeneity, triangle inequality and lower-bound validity
    /// on seeded random vectors.
    pub fn spot_check(&self, samples: usize, seed: u64) -> Result<(), LatticeError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = 1e-7;
        for _ in 0..samples {
            let x: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let nx = self.norm_f64(&x);
            let ny = self.norm_f64(&y);
            if nx <= 0.0 {
                return Err(LatticeError::InvalidNorm("norm is not positive on a nonzero vector".into()));
            }
            let scaled: Vec<f64> = x.iter().map(|v| -2.5 * v).collect();
            if (self.norm_f64(&scaled) - 2.5 * nx).abs() > tol * (1.0 + nx) {
                return Err(LatticeError::InvalidNorm("norm is not absolutely homogeneous".into()));
            }
            let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            if self.norm_f64(&sum) > nx + ny + tol * (1.0 + nx + ny) {
                return Err(LatticeError::InvalidNorm("triangle inequality fails".into()));
            }
            if self.lower_bound_f64(&x) > nx * (1.0 + tol) + tol {
                return Err(LatticeError::InvalidNorm("lower-bound Gram exceeds the norm".into()));
            }
        }
        Ok(())
    }

    /// `||f||* = max { f(x) : ||x|| <= 1 }`.
    pub fn dual(&self) -> Result<NormOracle, LatticeError> {
        match &self.kind {
            NormKind::Quadratic { gram } => NormOracle::quadratic(gram.inverse()?),
            NormKind::Polyhedral { facets } => NormOracle::polyhedral(polar_normals(facets)?),
            NormKind::External { eval, label } => {
                let dim = self.dim;
                let eval = eval.clone();
                // ||x|| <= sum |x_i| ||e_i|| <= |x|_2 sqrt(sum ||e_i||^2), hence
                // ||f||* >= |f|_2 / sqrt(sum ||e_i||^2).
                let s: f64 = (0..dim)
                    .map(|i| {
                        let mut e = vec![0.0; dim];
                        e[i] = 1.0;
                        eval(&e).1.powi(2)
                    })
                    .sum();
                let lower_gram = RatMatrix::identity(dim).scale(&crate::rational::dyadic(1.0 / (s * (1.0 + 1e-9)), 40));
                let q_inv = self.lower_gram.inverse()?.to_f64();
                let inner = eval.clone();
                let dual_eval: ExternalEval = Arc::new(move |y: &[f64]| dual_bracket(&*inner, &q_inv, y));
                NormOracle::external(dim, dual_eval, lower_gram, format!("dual of {label}"))
            }
        }
    }
}

/// Bracket for `max { y.x : ||x|| <= 1 }` of an external norm: the upper end
/// comes from the quadratic lower bound (`sqrt(y^T Q^{-1} y)`), the lower end
/// from a deterministic ascent over directions using the norm's upper bracket.
fn dual_bracket(eval: &(dyn Fn(&[f64]) -> (f64, f64) + Send + Sync), q_inv: &[Vec<f64>], y: &[f64]) -> (f64, f64) {
    let n = y.len();
    let mut upper = 0.0;
    for i in 0..n {
        for j in 0..n {
            upper += y[i] * q_inv[i][j] * y[j];
        }
    }
    let upper = upper.max(0.0).sqrt();
    if upper == 0.0 {
        return (0.0, 0.0);
    }
    let ratio = |x: &[f64]| {
        let (_, hi) = eval(x);
        if hi <= 0.0 {
            return 0.0;
        }
        x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / hi
    };
    // start from the Q^{-1} y direction and the coordinate axes
    let mut starts: Vec<Vec<f64>> = vec![(0..n).map(|i| (0..n).map(|j| q_inv[i][j] * y[j]).sum()).collect()];
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = y[i].signum();
        starts.push(e);
    }
    let mut best = 0.0f64;
    for mut x in starts {
        let mut val = ratio(&x);
        let mut step = 0.5;
        while step > 1e-10 {
            let mut improved = false;
            for i in 0..n {
                for s in [step, -step] {
                    let mut c = x.clone();
                    c[i] += s;
                    let v = ratio(&c);
                    if v > val {
                        val = v;
                        x = c;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(val);
    }
    (best.min(upper), upper)
}

/// One representative per `+-` pair, first nonzero entry positive, sorted.
pub fn dedup_sign(vs: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = vs
        .into_iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .map(|v| match v.iter().find(|x| !x.is_zero()) {
            Some(x) if x.is_negative() => v.iter().map(|y| -y).collect(),
            _ => v,
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    #[test]
    fn perfect_squares() {
        assert_eq!(perfect_square(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(perfect_square(&rat(2)), None);
        assert_eq!(NormValue::Sqrt(rat(2)).mul(&NormValue::Sqrt(rat(8))), NormValue::Exact(rat(4)));
    }

    #[test]
    fn classical_duals() {
        let l1 = NormOracle::l1(3);
        let dual = l1.dual().unwrap();
        let y = vec![rat(3), rat(-5), rat(1)];
        assert_eq!(dual.norm(&y), NormOracle::linf(3).norm(&y));
        let e = NormOracle::euclidean(2).dual().unwrap();
        assert_eq!(e.norm(&[rat(3), rat(4)]), NormValue::Exact(rat(5)));
    }

    #[test]
    fn bad_gram_rejected() {
        assert!(NormOracle::quadratic(RatMatrix::from_i64(&[&[1, 2], &[2, 1]])).is_err());
        assert!(NormOracle::polyhedral(vec![vec![rat(1), rat(0)]]).is_err());
    }

    #[test]
    fn external_spot_check() {
        let eval: ExternalEval = Arc::new(|x: &[f64]| {
            let v = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            (v, v)
        });
        let n = NormOracle::external(2, eval, RatMatrix::identity(2), "l2").unwrap();
        let d = n.dual().unwrap();
        let v = d.norm(&[rat(3), rat(4)]);
        assert!(v.lower() <= 5.0 + 1e-9 && v.upper() >= 5.0 - 1e-9);
        assert!(v.upper() - v.lower() < 1e-6);
        let bad: ExternalEval = Arc::new(|x: &[f64]| {
            let v = x.iter().map(|a| a.abs()).fold(0.0, f64::max);
            (v, v)
        });
        // sup norm is below the Euclidean lower bound it claims
        assert!(NormOracle::external(2, bad, RatMatrix::identity(2), "bad").is_err());
    }
}
