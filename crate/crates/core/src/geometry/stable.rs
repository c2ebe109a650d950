//! Norms on cohomology (least comass in a class) and on homology (the dual
//! stable norm), per degree.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::cohomology::{CohomologyClass, CohomologyRing};
use crate::dga::Cochain;
use crate::error::GeometryError;
use crate::geometry::comass::{comass_with, Comass, ComassEvaluator, ComassMethod};
use crate::geometry::convex::{maximize_dual, minimize_comass};
use crate::geometry::metric::InvariantMetric;
use crate::geometry::GeometryOptions;
use crate::lattice::{NormOracle, NormValue, ValueReport};
use crate::linalg::{dot, RatMatrix};
use crate::rational::{dyadic, rationals_to_strings, to_f64, Rational};

/// Checks that `ring` comes from a Lie algebra of the metric's dimension.
pub fn check_invariant(ring: &CohomologyRing, metric: &InvariantMetric) -> Result<(), GeometryError> {
    let lie = ring.model().lie_structure().ok_or(GeometryError::NotInvariantModel)?;
    if lie.dim() != metric.dim() {
        return Err(GeometryError::MetricShape { expected: lie.dim(), found: metric.dim() });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct MinComass {
    pub value: NormValue,
    pub estimate: f64,
    /// Cocycle in the class attaining `estimate`.
    pub witness: Cochain,
    pub method: ComassMethod,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinComassReport {
    pub value: ValueReport,
    pub estimate: f64,
    pub witness: Vec<String>,
    pub method: ComassMethod,
    pub certified: bool,
}

impl MinComass {
    pub fn report(&self) -> MinComassReport {
        MinComassReport {
            value: self.value.report(),
            estimate: self.estimate,
            witness: rationals_to_strings(&self.witness.coeffs),
            method: self.method,
            certified: self.certified,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StableNorm {
    pub value: NormValue,
    pub estimate: f64,
    pub certified: bool,
}

/// Norm data for one degree `k`. Cohomology is addressed by integral
/// coordinates `z`, homology by coordinates `x` with `<z, x> = z^T P x`.
#[derive(Clone, Debug)]
pub struct NormProfile {
    degree: usize,
    evaluator: ComassEvaluator,
    cocycles: Vec<Vec<Rational>>,
    coboundaries: Vec<Vec<Rational>>,
    pairing: RatMatrix,
    /// `z -> min_c mass(u(z) + B c)^2` as a Gram matrix.
    mass_gram: RatMatrix,
    /// `B^T Q B` and `B^T Q U`, for exact least squares.
    bqb: RatMatrix,
    bqu: RatMatrix,
    opts: GeometryOptions,
}

impl NormProfile {
    pub fn new(ring: &CohomologyRing, metric: &InvariantMetric, k: usize, opts: &GeometryOptions) -> Result<Self, GeometryError> {
        check_invariant(ring, metric)?;
        let model = ring.model();
        let b = ring.betti(k);
        let cocycles: Vec<Vec<Rational>> = (0..b).map(|i| ring.integral_cocycle(k, i).coeffs.clone()).collect();
        let coboundaries: Vec<Vec<Rational>> = model.coboundary_space(k).basis().to_vec();
        let evaluator = ComassEvaluator::new(metric, k, opts);
        let q = evaluator.form_gram();
        let dim = model.dim(k);
        let u = RatMatrix::from_rows_with_cols(cocycles.clone(), dim).map_err(crate::error::ModelError::from)?.transpose();
        let bm = RatMatrix::from_rows_with_cols(coboundaries.clone(), dim).map_err(crate::error::ModelError::from)?.transpose();
        let lin = |e| GeometryError::from(crate::error::ModelError::from(e));
        let qu = q.mul(&u).map_err(lin)?;
        let qb = q.mul(&bm).map_err(lin)?;
        let uqu = u.transpose().mul(&qu).map_err(lin)?;
        let bqb = bm.transpose().mul(&qb).map_err(lin)?;
        let bqu = bm.transpose().mul(&qu).map_err(lin)?;
        let mass_gram = if coboundaries.is_empty() {
            uqu
        } else {
            let x = bqb.inverse().map_err(lin)?.mul(&bqu).map_err(lin)?;
            uqu.sub(&bqu.transpose().mul(&x).map_err(lin)?).map_err(lin)?
        };
        Ok(Self {
            degree: k,
            evaluator,
            cocycles,
            coboundaries,
            pairing: ring.pairing_matrix(k).clone(),
            mass_gram,
            bqb,
            bqu,
            opts: opts.clone(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn betti(&self) -> usize {
        self.cocycles.len()
    }

    pub fn evaluator(&self) -> &ComassEvaluator {
        &self.evaluator
    }

    /// Comass equals the metric norm in this degree, so every value is exact.
    pub fn is_exact(&self) -> bool {
        self.evaluator.is_euclidean()
    }

    pub fn options(&self) -> &GeometryOptions {
        &self.opts
    }

    pub fn mass_gram(&self) -> &RatMatrix {
        &self.mass_gram
    }

    pub fn comass(&self, coeffs: &[Rational]) -> Comass {
        comass_with(&self.evaluator, coeffs, self.opts.tol)
    }

    fn cocycle(&self, z: &[Rational]) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); self.evaluator.len()];
        for (zi, u) in z.iter().zip(&self.cocycles) {
            c.iter_mut().zip(u).for_each(|(a, b)| *a += zi * b);
        }
        c
    }

    fn f64_rows(rows: &[Vec<Rational>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.iter().map(to_f64).collect()).collect()
    }

    /// Least comass of a cocycle in the class with integral coordinates `z`.
    pub fn min_comass(&self, z: &[Rational]) -> Result<MinComass, GeometryError> {
        let base = self.cocycle(z);
        let k = self.degree;
        let add = |c: &[Rational]| -> Vec<Rational> {
            let mut w = base.clone();
            for (ci, b) in c.iter().zip(&self.coboundaries) {
                w.iter_mut().zip(b).for_each(|(a, v)| *a += ci * v);
            }
            w
        };
        if self.is_exact() {
            let witness = if self.coboundaries.is_empty() {
                base.clone()
            } else {
                let rhs = self.bqu.mul_vec(z).map_err(|e| GeometryError::from(crate::error::ModelError::from(e)))?;
                let c = self
                    .bqb
                    .solve(&rhs)
                    .map_err(|e| GeometryError::from(crate::error::ModelError::from(e)))?
                    .expect("positive definite");
                add(&c.iter().map(|x| -x).collect::<Vec<_>>())
            };
            let c = self.comass(&witness);
            return Ok(MinComass {
                estimate: c.estimate,
                value: c.value,
                witness: Cochain::new(k, witness),
                method: c.method,
                certified: true,
            });
        }
        let basef: Vec<f64> = base.iter().map(to_f64).collect();
        let m = minimize_comass(&self.evaluator, &basef, &Self::f64_rows(&self.coboundaries), &self.opts)?;
        let c: Vec<Rational> = m.x.iter().map(|&x| dyadic(x, 40)).collect();
        Ok(MinComass {
            value: NormValue::Interval { lo: m.lo, hi: m.hi },
            estimate: m.estimate,
            witness: Cochain::new(k, add(&c)),
            method: self.evaluator.method(),
            certified: m.certified,
        })
    }

    pub fn min_comass_in_class(&self, ring: &CohomologyRing, a: &CohomologyClass) -> Result<MinComass, GeometryError> {
        let z = ring.integral_coords(a)?;
        self.min_comass(&z)
    }

    /// Stable norm of the homology class with coordinates `x`: the dual of
    /// the least-comass norm.
    pub fn stable_norm(&self, x: &[Rational]) -> Result<StableNorm, GeometryError> {
        let lin = |e| GeometryError::from(crate::error::ModelError::from(e));
        let ell = self.pairing.mul_vec(x).map_err(lin)?;
        if self.is_exact() {
            let s = self.mass_gram.solve(&ell).map_err(lin)?.expect("positive definite");
            let v = NormValue::Sqrt(dot(&ell, &s)).normalized();
            return Ok(StableNorm { estimate: v.to_f64(), value: v, certified: true });
        }
        let ellf: Vec<f64> = ell.iter().map(to_f64).collect();
        self.stable_norm_f64(&ellf)
    }

    fn stable_norm_f64(&self, ell: &[f64]) -> Result<StableNorm, GeometryError> {
        let m = maximize_dual(
            &self.evaluator,
            &Self::f64_rows(&self.cocycles),
            &Self::f64_rows(&self.coboundaries),
            ell,
            &self.opts,
        )?;
        Ok(StableNorm { value: NormValue::Interval { lo: m.lo, hi: m.hi }, estimate: m.estimate, certified: m.certified })
    }

    /// Least-comass norm on integral coordinates of `H^k`.
    pub fn cohomology_norm(&self) -> Result<NormOracle, GeometryError> {
        if self.is_exact() {
            return Ok(NormOracle::quadratic(self.mass_gram.clone())?);
        }
        // comass >= mass / sqrt(N)
        let lower = self.mass_gram.scale(&Rational::new(1.into(), self.evaluator.len().into()));
        let me = Arc::new(self.clone());
        let eval = Arc::new(move |z: &[f64]| {
            let base: Vec<f64> = (0..me.evaluator.len())
                .map(|j| z.iter().zip(&me.cocycles).map(|(a, u)| a * to_f64(&u[j])).sum())
                .collect();
            match minimize_comass(&me.evaluator, &base, &Self::f64_rows(&me.coboundaries), &me.opts) {
                Ok(m) => (m.lo, m.hi),
                Err(_) => (0.0, f64::INFINITY),
            }
        });
        Ok(NormOracle::external(self.betti(), eval, lower, format!("least comass in degree {}", self.degree))?)
    }

    /// Stable norm on homology coordinates.
    pub fn homology_norm(&self) -> Result<NormOracle, GeometryError> {
        let lin = |e| GeometryError::from(crate::error::ModelError::from(e));
        let dual = self.mass_gram.inverse().map_err(lin)?;
        let gram = self.pairing.transpose().mul(&dual).map_err(lin)?.mul(&self.pairing).map_err(lin)?;
        if self.is_exact() {
            return Ok(NormOracle::quadratic(gram)?);
        }
        let me = Arc::new(self.clone());
        let pairing = self.pairing.to_f64();
        let eval = Arc::new(move |x: &[f64]| {
            let ell: Vec<f64> = pairing.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect();
            match me.stable_norm_f64(&ell) {
                Ok(s) => (s.value.lower(), s.value.upper()),
                Err(_) => (0.0, f64::INFINITY),
            }
        });
        Ok(NormOracle::external(self.betti(), eval, gram, format!("stable norm in degree {}", self.degree))?)
    }
}
