//! Comass of invariant forms: the supremum of a form on unit simple
//! k-vectors.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dga::exterior::{indices, ExteriorBasis};
use crate::geometry::metric::{det_f64, InvariantMetric};
use crate::geometry::GeometryOptions;
use crate::lattice::NormValue;
use crate::linalg::{dot, RatMatrix};
use crate::rational::{to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComassMethod {
    /// Degrees where every form is simple; comass equals the metric norm.
    Euclidean,
    /// 2-forms: largest coefficient of the skew normal form.
    Spectral,
    /// Multistart ascent over orthonormal frames, bounded above by the mass.
    Ascent,
}

/// One evaluation: a bracket for the comass and a unit simple k-vector,
/// written as a linear functional on coefficient vectors, attaining `lo`.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub lo: f64,
    pub hi: f64,
    pub cut: Vec<f64>,
}

/// Comass on `k`-forms for a fixed metric.
#[derive(Clone, Debug)]
pub struct ComassEvaluator {
    n: usize,
    k: usize,
    subsets: Vec<Vec<usize>>,
    /// Coefficients in the orthonormal coframe: `a' = T a`.
    transform: Vec<Vec<f64>>,
    form_gram: RatMatrix,
    method: ComassMethod,
    starts: usize,
    seed: u64,
    max_iter: usize,
}

impl ComassEvaluator {
    pub fn new(metric: &InvariantMetric, k: usize, opts: &GeometryOptions) -> Self {
        let n = metric.dim();
        let subsets: Vec<Vec<usize>> = ExteriorBasis::new(n).masks(k).iter().map(|&m| indices(m)).collect();
        let m = metric.orthonormal_frame();
        let transform = subsets
            .iter()
            .map(|i| {
                subsets
                    .iter()
                    .map(|j| det_f64(j.iter().map(|&r| i.iter().map(|&c| m[(r, c)]).collect()).collect()))
                    .collect()
            })
            .collect();
        let method = if k <= 1 || k + 1 >= n {
            ComassMethod::Euclidean
        } else if k == 2 {
            ComassMethod::Spectral
        } else {
            ComassMethod::Ascent
        };
        Self {
            n,
            k,
            subsets,
            transform,
            form_gram: metric.form_gram(k),
            method,
            starts: opts.starts.max(1),
            seed: opts.seed,
            max_iter: opts.max_iter,
        }
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn method(&self) -> ComassMethod {
        self.method
    }

    pub fn is_euclidean(&self) -> bool {
        self.method == ComassMethod::Euclidean
    }

    /// Exact inner product on `k`-forms.
    pub fn form_gram(&self) -> &RatMatrix {
        &self.form_gram
    }

    pub fn orthonormal(&self, a: &[f64]) -> Vec<f64> {
        self.transform.iter().map(|row| row.iter().zip(a).map(|(t, x)| t * x).sum()).collect()
    }

    pub fn mass(&self, a: &[f64]) -> f64 {
        self.orthonormal(a).iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Pull back Plücker coordinates from the orthonormal coframe.
    fn pullback(&self, p: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|j| (0..self.len()).map(|i| self.transform[i][j] * p[i]).sum()).collect()
    }

    fn plucker(&self, v: &[Vec<f64>]) -> Vec<f64> {
        self.subsets.iter().map(|s| det_f64(v.iter().map(|row| s.iter().map(|&c| row[c]).collect()).collect())).collect()
    }

    pub fn evaluate(&self, a: &[f64]) -> Evaluation {
        let ap = self.orthonormal(a);
        let mass = ap.iter().map(|x| x * x).sum::<f64>().sqrt();
        let p = match self.method {
            ComassMethod::Euclidean => {
                if mass == 0.0 {
                    let mut p = vec![0.0; self.len()];
                    p[0] = 1.0;
                    p
                } else {
                    ap.iter().map(|x| x / mass).collect()
                }
            }
            ComassMethod::Spectral => self.plucker(&self.spectral_frame(&ap)),
            ComassMethod::Ascent => self.plucker(&self.ascent(&ap)),
        };
        let cut = self.pullback(&p);
        let lo = dot_f64(a, &cut);
        let hi = match self.method {
            ComassMethod::Euclidean => mass,
            // eigenvalue error is a few ulps of the largest eigenvalue
            ComassMethod::Spectral => lo.max(0.0) + 1e-12 * mass,
            ComassMethod::Ascent => mass,
        };
        Evaluation { lo, hi: hi.max(lo), cut }
    }

    fn spectral_frame(&self, ap: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut w = DMatrix::<f64>::zeros(n, n);
        for (s, x) in self.subsets.iter().zip(ap) {
            w[(s[0], s[1])] = *x;
            w[(s[1], s[0])] = -*x;
        }
        let e = SymmetricEigen::new(&w * w.transpose());
        let top = (0..n).max_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j])).expect("n >= 2");
        let x = e.eigenvectors.column(top).into_owned();
        let y = w.transpose() * &x;
        let ny = y.norm();
        let x: Vec<f64> = x.iter().cloned().collect();
        let y: Vec<f64> = if ny > 0.0 {
            y.iter().map(|v| v / ny).collect()
        } else {
            // zero form: any orthonormal pair
            let mut y = vec![0.0; n];
            let j = (0..n).min_by(|&i, &j| x[i].abs().total_cmp(&x[j].abs())).expect("n >= 2");
            y[j] = 1.0;
            let c = x[j];
            let mut y: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - c * b).collect();
            let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            y.iter_mut().for_each(|v| *v /= ny);
            y
        };
        vec![x, y]
    }

    fn value(&self, ap: &[f64], v: &[Vec<f64>]) -> f64 {
        dot_f64(ap, &self.plucker(v))
    }

    /// Gradient of `v_r -> a'(v_1, .., v_r, .., v_k)`.
    fn slot_gradient(&self, ap: &[f64], v: &[Vec<f64>], r: usize) -> Vec<f64> {
        let k = self.k;
        let mut g = vec![0.0; self.n];
        let others: Vec<&Vec<f64>> = v.iter().enumerate().filter(|(i, _)| *i != r).map(|(_, x)| x).collect();
        for (s, &c) in self.subsets.iter().zip(ap) {
            if c == 0.0 {
                continue;
            }
            for p in 0..k {
                let cols: Vec<usize> = s.iter().enumerate().filter(|(q, _)| *q != p).map(|(_, &x)| x).collect();
                let minor = det_f64(others.iter().map(|row| cols.iter().map(|&j| row[j]).collect()).collect());
                let sign = if (r + p) % 2 == 0 { 1.0 } else { -1.0 };
                g[s[p]] += sign * c * minor;
            }
        }
        g
    }

    fn ascent_from(&self, ap: &[f64], mut v: Vec<Vec<f64>>) -> (f64, Vec<Vec<f64>>) {
        orthonormalize(&mut v);
        let mut val = self.value(ap, &v);
        for _ in 0..self.max_iter {
            for r in 0..self.k {
                let g = self.slot_gradient(ap, &v, r);
                let ng = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if ng > 0.0 {
                    v[r] = g.iter().map(|x| x / ng).collect();
                }
            }
            orthonormalize(&mut v);
            let next = self.value(ap, &v);
            let done = next - val <= 1e-14 * next.abs().max(1e-300);
            val = next;
            if done {
                break;
            }
        }
        if val < 0.0 {
            v[0].iter_mut().for_each(|x| *x = -*x);
            val = -val;
        }
        (val, v)
    }

    fn ascent(&self, ap: &[f64]) -> Vec<Vec<f64>> {
        // the best coordinate k-plane is a deterministic first start
        let top = (0..ap.len()).max_by(|&i, &j| ap[i].abs().total_cmp(&ap[j].abs())).expect("nonempty");
        let unit = |c: usize| {
            let mut e = vec![0.0; self.n];
            e[c] = 1.0;
            e
        };
        let first: Vec<Vec<f64>> = self.subsets[top].iter().map(|&c| unit(c)).collect();
        let runs: Vec<(f64, usize, Vec<Vec<f64>>)> = (0..self.starts)
            .into_par_iter()
            .map(|s| {
                let start = if s == 0 {
                    first.clone()
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9).wrapping_add(s as u64));
                    (0..self.k).map(|_| (0..self.n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
                };
                let (val, v) = self.ascent_from(ap, start);
                (val, s, v)
            })
            .collect();
        runs.into_iter()
            .max_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
            .map(|r| r.2)
            .expect("at least one start")
    }
}

fn orthonormalize(v: &mut [Vec<f64>]) {
    for i in 0..v.len() {
        for j in 0..i {
            let c = dot_f64(&v[i], &v[j]);
            let vj = v[j].clone();
            v[i].iter_mut().zip(&vj).for_each(|(x, y)| *x -= c * y);
        }
        let n = v[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            v[i].iter_mut().for_each(|x| *x /= n);
        }
    }
}

pub(crate) fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Debug)]
pub struct Comass {
    pub value: NormValue,
    /// Best value actually attained on a unit simple k-vector.
    pub estimate: f64,
    pub method: ComassMethod,
    /// Bracket width within the requested tolerance.
    pub certified: bool,
}

/// Comass of a `k`-form given by its coefficients in the exterior basis.
pub fn comass(metric: &InvariantMetric, k: usize, coeffs: &[Rational], opts: &GeometryOptions) -> Comass {
    let ev = ComassEvaluator::new(metric, k, opts);
    comass_with(&ev, coeffs, opts.tol)
}

pub fn comass_with(ev: &ComassEvaluator, coeffs: &[Rational], tol: f64) -> Comass {
    if ev.is_euclidean() {
        let q = ev.form_gram().mul_vec(coeffs).expect("shape");
        let v = NormValue::Sqrt(dot(coeffs, &q)).normalized();
        return Comass { estimate: v.to_f64(), value: v, method: ev.method(), certified: true };
    }
    let a: Vec<f64> = coeffs.iter().map(to_f64).collect();
    let e = ev.evaluate(&a);
    Comass {
        value: NormValue::Interval { lo: e.lo, hi: e.hi },
        estimate: e.lo,
        method: ev.method(),
        certified: e.hi - e.lo <= tol * e.hi.max(f64::MIN_POSITIVE),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};

    fn opts() -> GeometryOptions {
        GeometryOptions::default()
    }

    #[test]
    fn one_forms_and_top_forms() {
        let g = InvariantMetric::identity(3);
        let c = comass(&g, 1, &[rat(1), rat(0), rat(0)], &opts());
        assert_eq!(c.value, NormValue::Exact(rat(1)));
        let g = InvariantMetric::diagonal(&[rat(1), rat(4), rat(9)]).unwrap();
        let c = comass(&g, 3, &[rat(1)], &opts());
        assert_eq!(c.value, NormValue::Exact(ratio(1, 6)));
    }

    /// Dense sampling of unit simple 2-vectors gives a lower bound close to
    /// the spectral value.
    #[test]
    fn two_forms_match_sampling() {
        let g = InvariantMetric::identity(4);
        // 3 e12 - 2 e34 + e13
        let coeffs = [rat(3), rat(1), rat(0), rat(0), rat(0), rat(-2)];
        let c = comass(&g, 2, &coeffs, &opts());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ev = ComassEvaluator::new(&g, 2, &opts());
        let a: Vec<f64> = coeffs.iter().map(to_f64).collect();
        let mut best: f64 = 0.0;
        for _ in 0..20000 {
            let mut v: Vec<Vec<f64>> = (0..2).map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            orthonormalize(&mut v);
            best = best.max(ev.value(&a, &v).abs());
        }
        assert!(best <= c.value.upper() + 1e-12);
        assert!(c.value.upper() - best < 0.05);
        // a e12 + b e34 has comass max(|a|, |b|)
        let c = comass(&g, 2, &[rat(2), rat(0), rat(0), rat(0), rat(0), rat(-5)], &opts());
        assert!((c.value.to_f64() - 5.0).abs() < 1e-9 && c.certified);
    }

    #[test]
    fn ascent_on_three_forms() {
        let g = InvariantMetric::identity(6);
        let ev = ComassEvaluator::new(&g, 3, &opts());
        assert_eq!(ev.method(), ComassMethod::Ascent);
        // e123 + e456 is a calibration-type sum with comass 1
        let mut a = vec![rat(0); 20];
        a[0] = rat(1);
        a[19] = rat(1);
        let c = comass_with(&ev, &a, 1e-6);
        assert!((c.estimate - 1.0).abs() < 1e-9);
        assert!(!c.certified);
    }
}
