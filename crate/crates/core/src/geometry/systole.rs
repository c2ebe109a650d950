//! Stable systoles, isoperimetric quotients over invariant forms, volume.

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cohomology::CohomologyRing;
use crate::dga::exterior::binomial;
use crate::dga::{Cochain, CochainModel};
use crate::error::{GeometryError, ModelError};
use crate::geometry::comass::{dot_f64, ComassEvaluator};
use crate::geometry::convex::minimize_comass;
use crate::geometry::metric::InvariantMetric;
use crate::geometry::stable::{check_invariant, NormProfile};
use crate::geometry::GeometryOptions;
use crate::lattice::{minima_prefix, MinimaProfile, MinimaReport, NormValue, NormedLattice, ValueReport, DEFAULT_BUDGET};
use crate::linalg::RatMatrix;
use crate::rational::{dyadic, format_rational, rationals_to_strings, to_f64, Rational};

/// `sqrt(det G)` times the covolume of the lattice.
pub fn volume(metric: &InvariantMetric, covolume: &Rational) -> NormValue {
    NormValue::Sqrt(metric.determinant() * covolume * covolume).normalized()
}

#[derive(Clone, Debug)]
pub struct StableSystole {
    pub degree: usize,
    pub value: NormValue,
    /// Homology coordinates of the shortest integral class.
    pub witness: Vec<i64>,
    pub minima: MinimaProfile,
    pub certified: bool,
}

/// Shortest nonzero integral homology class in the stable norm, or `None`
/// when `H_k` vanishes.
pub fn stable_systole(profile: &NormProfile) -> Result<Option<StableSystole>, GeometryError> {
    if profile.betti() == 0 {
        return Ok(None);
    }
    let lattice = NormedLattice::standard(profile.homology_norm()?);
    let minima = minima_prefix(&lattice, 1, DEFAULT_BUDGET)?;
    let value = minima.lambdas[0].clone();
    let certified = profile.is_exact()
        || value.upper() - value.lower() <= profile.options().tol * value.upper().max(f64::MIN_POSITIVE);
    Ok(Some(StableSystole { degree: profile.degree(), witness: minima.witnesses[0].clone(), value, minima, certified }))
}

#[derive(Clone, Debug)]
pub struct Isoperimetric {
    pub degree: usize,
    pub value: NormValue,
    pub estimate: f64,
    /// Exact form realizing the quotient and its least-comass primitive.
    pub exact_form: Option<Cochain>,
    pub primitive: Option<Cochain>,
    pub no_exact_forms: bool,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoperimetricReport {
    pub degree: usize,
    pub value: ValueReport,
    pub estimate: f64,
    pub exact_form: Option<Vec<String>>,
    pub primitive: Option<Vec<String>>,
    pub no_exact_forms: bool,
    pub certified: bool,
}

impl Isoperimetric {
    pub fn report(&self) -> IsoperimetricReport {
        IsoperimetricReport {
            degree: self.degree,
            value: self.value.report(),
            estimate: self.estimate,
            exact_form: self.exact_form.as_ref().map(|c| rationals_to_strings(&c.coeffs)),
            primitive: self.primitive.as_ref().map(|c| rationals_to_strings(&c.coeffs)),
            no_exact_forms: self.no_exact_forms,
            certified: self.certified,
        }
    }
}

fn lin(e: crate::error::LinalgError) -> GeometryError {
    GeometryError::from(ModelError::from(e))
}

fn columns(rows: &[Vec<Rational>], dim: usize) -> Result<RatMatrix, GeometryError> {
    Ok(RatMatrix::from_rows_with_cols(rows.to_vec(), dim).map_err(lin)?.transpose())
}

/// Quadratic forms `A` (least mass of a primitive) and `C` (mass) on the
/// space of exact `k`-forms, in the coordinates of `exact`.
struct ExactForms {
    exact: Vec<Vec<Rational>>,
    primitives: Vec<Vec<Rational>>,
    closed: Vec<Vec<Rational>>,
    a: RatMatrix,
    c: RatMatrix,
    /// `(Z^T Q' Z)^{-1} Z^T Q' P`, the closed correction of least mass.
    correction: Option<RatMatrix>,
}

impl ExactForms {
    fn new(model: &CochainModel, metric: &InvariantMetric, k: usize) -> Result<Self, GeometryError> {
        let exact: Vec<Vec<Rational>> = model.coboundary_space(k).basis().to_vec();
        let mut primitives = Vec::with_capacity(exact.len());
        for e in &exact {
            primitives.push(model.solve_primitive(&Cochain::new(k, e.clone()))?.coeffs);
        }
        let closed: Vec<Vec<Rational>> = model.cocycle_space(k - 1).basis().to_vec();
        let q = metric.form_gram(k);
        let q1 = metric.form_gram(k - 1);
        let bm = columns(&exact, model.dim(k))?;
        let pm = columns(&primitives, model.dim(k - 1))?;
        let c = bm.transpose().mul(&q.mul(&bm).map_err(lin)?).map_err(lin)?;
        let ppq = pm.transpose().mul(&q1.mul(&pm).map_err(lin)?).map_err(lin)?;
        let (a, correction) = if closed.is_empty() {
            (ppq, None)
        } else {
            let zm = columns(&closed, model.dim(k - 1))?;
            let zqz = zm.transpose().mul(&q1.mul(&zm).map_err(lin)?).map_err(lin)?;
            let zqp = zm.transpose().mul(&q1.mul(&pm).map_err(lin)?).map_err(lin)?;
            let corr = zqz.inverse().map_err(lin)?.mul(&zqp).map_err(lin)?;
            (ppq.sub(&zqp.transpose().mul(&corr).map_err(lin)?).map_err(lin)?, Some(corr))
        };
        Ok(Self { exact, primitives, closed, a, c, correction })
    }

    fn form(&self, rows: &[Vec<Rational>], c: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); rows[0].len()];
        for (ci, r) in c.iter().zip(rows) {
            out.iter_mut().zip(r).for_each(|(a, b)| *a += ci * b);
        }
        out
    }

    /// Least-mass primitive of the exact form with coordinates `c`.
    fn least_mass_primitive(&self, c: &[Rational]) -> Vec<Rational> {
        let mut beta = self.form(&self.primitives, c);
        if let Some(corr) = &self.correction {
            let w = corr.mul_vec(c).expect("shape");
            for (wi, z) in w.iter().zip(&self.closed) {
                beta.iter_mut().zip(z).for_each(|(a, b)| *a -= wi * b);
            }
        }
        beta
    }

    /// Largest generalized eigenvalue of `(A, C)` with its eigenvector.
    fn top_eigen(&self) -> (f64, Vec<f64>) {
        let e = self.exact.len();
        let c = DMatrix::from_fn(e, e, |i, j| to_f64(self.c.get(i, j)));
        let a = DMatrix::from_fn(e, e, |i, j| to_f64(self.a.get(i, j)));
        let l = c.cholesky().expect("positive definite").l();
        let li = l.try_inverse().expect("invertible");
        let m = &li * a * li.transpose();
        let m = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(m);
        let top = (0..e).max_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j])).expect("nonempty");
        let y = eig.eigenvectors.column(top).into_owned();
        let x = li.transpose() * y;
        (eig.eigenvalues[top].max(0.0), x.iter().cloned().collect())
    }
}

/// `IQ_k = sup over exact invariant k-forms a of (least comass of a primitive) / comass(a)`.
pub fn isoperimetric_quotient(
    ring: &CohomologyRing,
    metric: &InvariantMetric,
    k: usize,
    opts: &GeometryOptions,
) -> Result<Isoperimetric, GeometryError> {
    check_invariant(ring, metric)?;
    let model = ring.model();
    let empty = |degree| Isoperimetric {
        degree,
        value: NormValue::zero(),
        estimate: 0.0,
        exact_form: None,
        primitive: None,
        no_exact_forms: true,
        certified: true,
    };
    if k == 0 || k > model.top_degree() || model.coboundary_space(k).is_zero() {
        return Ok(empty(k));
    }
    let forms = ExactForms::new(model, metric, k)?;
    let ev = ComassEvaluator::new(metric, k, opts);
    let ev1 = ComassEvaluator::new(metric, k - 1, opts);
    let e = forms.exact.len();
    if ev.is_euclidean() && ev1.is_euclidean() {
        if e == 1 {
            let value = NormValue::Sqrt(forms.a.get(0, 0) / forms.c.get(0, 0)).normalized();
            let one = [Rational::from_integer(1.into())];
            return Ok(Isoperimetric {
                degree: k,
                estimate: value.to_f64(),
                value,
                exact_form: Some(Cochain::new(k, forms.form(&forms.exact, &one))),
                primitive: Some(Cochain::new(k - 1, forms.least_mass_primitive(&one))),
                no_exact_forms: false,
                certified: true,
            });
        }
        let (lambda, x) = forms.top_eigen();
        let v = lambda.sqrt();
        let c: Vec<Rational> = x.iter().map(|&t| dyadic(t, 40)).collect();
        return Ok(Isoperimetric {
            degree: k,
            value: NormValue::Interval { lo: v * (1.0 - 1e-12), hi: v * (1.0 + 1e-12) },
            estimate: v,
            exact_form: Some(Cochain::new(k, forms.form(&forms.exact, &c))),
            primitive: Some(Cochain::new(k - 1, forms.least_mass_primitive(&c))),
            no_exact_forms: false,
            certified: true,
        });
    }
    // general degrees: seeded pattern search over the sphere of exact forms
    let exactf: Vec<Vec<f64>> = forms.exact.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let primf: Vec<Vec<f64>> = forms.primitives.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let closedf: Vec<Vec<f64>> = forms.closed.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let combo = |rows: &[Vec<f64>], c: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; rows[0].len()];
        for (ci, r) in c.iter().zip(rows) {
            out.iter_mut().zip(r).for_each(|(a, b)| *a += ci * b);
        }
        out
    };
    // (lower bound, estimate) of the ratio at c
    let ratio = |c: &[f64]| -> Result<(f64, f64, Vec<f64>), GeometryError> {
        let alpha = ev.evaluate(&combo(&exactf, c));
        let inner = minimize_comass(&ev1, &combo(&primf, c), &closedf, opts)?;
        if alpha.lo <= 0.0 {
            return Ok((0.0, 0.0, inner.x));
        }
        Ok((inner.lo / alpha.hi, inner.estimate / alpha.lo, inner.x))
    };
    let mut starts: Vec<Vec<f64>> = (0..e).map(|i| (0..e).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.starts.saturating_sub(e) {
        starts.push((0..e).map(|_| rng.random_range(-1.0..1.0)).collect());
    }
    let unit = |mut c: Vec<f64>| {
        let n = dot_f64(&c, &c).sqrt();
        c.iter_mut().for_each(|x| *x /= n);
        c
    };
    let mut best: Option<(f64, f64, Vec<f64>, Vec<f64>)> = None;
    for s in starts {
        let mut c = unit(s);
        let (mut lo, mut est, mut x) = ratio(&c)?;
        let mut h = if e == 1 { 0.0 } else { 0.5 };
        while h > 1e-4 {
            let mut moved = false;
            for j in 0..e {
                for sign in [1.0, -1.0] {
                    let mut t = c.clone();
                    t[j] += sign * h;
                    let t = unit(t);
                    let (l2, e2, x2) = ratio(&t)?;
                    if e2 > est * (1.0 + 1e-12) {
                        (c, lo, est, x) = (t, l2, e2, x2);
                        moved = true;
                    }
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        if best.as_ref().is_none_or(|b| est > b.1) {
            best = Some((lo, est, c, x));
        }
    }
    let (lo, est, c, x) = best.expect("at least one start");
    // comass >= mass / sqrt(N) bounds the quotient by the Euclidean one
    let (lambda, _) = forms.top_eigen();
    let hi = (binomial(metric.dim(), k) as f64 * lambda).sqrt().max(est);
    let cr: Vec<Rational> = c.iter().map(|&t| dyadic(t, 40)).collect();
    let mut beta = forms.form(&forms.primitives, &cr);
    for (xi, z) in x.iter().zip(&forms.closed) {
        let xi = dyadic(*xi, 40);
        beta.iter_mut().zip(z).for_each(|(a, b)| *a += &xi * b);
    }
    Ok(Isoperimetric {
        degree: k,
        value: NormValue::Interval { lo, hi },
        estimate: est,
        exact_form: Some(Cochain::new(k, forms.form(&forms.exact, &cr))),
        primitive: Some(Cochain::new(k - 1, beta)),
        no_exact_forms: false,
        certified: hi - lo <= opts.tol * hi,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SystoleEntry {
    pub value: ValueReport,
    pub witness: Vec<i64>,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub degree: usize,
    pub betti: usize,
    pub comass_method: crate::geometry::ComassMethod,
    pub stsys: Option<SystoleEntry>,
    pub minima: Option<MinimaReport>,
    pub iq: IsoperimetricReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct SystoleReport {
    pub model: String,
    pub metric: Vec<Vec<String>>,
    pub degrees: Vec<DegreeReport>,
    pub volume: ValueReport,
}

/// Stable systole, successive minima of `H_k(Z)` and `IQ_k` for each degree.
pub fn systole_report(
    ring: &CohomologyRing,
    metric: &InvariantMetric,
    covolume: &Rational,
    degrees: &[usize],
    opts: &GeometryOptions,
) -> Result<SystoleReport, GeometryError> {
    check_invariant(ring, metric)?;
    let mut out = Vec::new();
    for &k in degrees {
        if k > ring.top_degree() {
            return Err(ModelError::DegreeOutOfRange { degree: k, top: ring.top_degree() }.into());
        }
        let profile = NormProfile::new(ring, metric, k, opts)?;
        let (stsys, minima) = if profile.betti() == 0 {
            (None, None)
        } else {
            let lattice = NormedLattice::standard(profile.homology_norm()?);
            let minima = crate::lattice::successive_minima(&lattice)?;
            let s = stable_systole(&profile)?.expect("nonzero betti");
            (
                Some(SystoleEntry { value: s.value.report(), witness: s.witness, certified: s.certified }),
                Some(minima.report()),
            )
        };
        out.push(DegreeReport {
            degree: k,
            betti: profile.betti(),
            comass_method: profile.evaluator().method(),
            stsys,
            minima,
            iq: isoperimetric_quotient(ring, metric, k, opts)?.report(),
        });
    }
    Ok(SystoleReport {
        model: ring.model().name().to_string(),
        metric: metric.gram().to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        degrees: out,
        volume: volume(metric, covolume).report(),
    })
}


#[derive(Clone, Debug)]
pub struct Primitive {
    pub cochain: Cochain,
    pub value: NormValue,
    pub estimate: f64,
    pub certified: bool,
}

/// Primitive of the exact form `alpha` with least comass (least mass in
/// degrees where the two agree).
pub fn least_comass_primitive(
    model: &CochainModel,
    metric: &InvariantMetric,
    alpha: &Cochain,
    opts: &GeometryOptions,
) -> Result<Primitive, GeometryError> {
    let k = alpha.degree;
    if k == 0 {
        return Err(ModelError::DegreeOutOfRange { degree: 0, top: model.top_degree() }.into());
    }
    let p = model.solve_primitive(alpha)?.coeffs;
    let closed: Vec<Vec<Rational>> = model.cocycle_space(k - 1).basis().to_vec();
    let ev = ComassEvaluator::new(metric, k - 1, opts);
    let beta = if closed.is_empty() {
        p
    } else if ev.is_euclidean() {
        let q = ev.form_gram();
        let zm = columns(&closed, model.dim(k - 1))?;
        let zq = zm.transpose().mul(q).map_err(lin)?;
        let w = zq.mul(&zm).map_err(lin)?.solve(&zq.mul_vec(&p).map_err(lin)?).map_err(lin)?.expect("positive definite");
        let mut beta = p;
        for (wi, z) in w.iter().zip(&closed) {
            beta.iter_mut().zip(z).for_each(|(a, b)| *a -= wi * b);
        }
        beta
    } else {
        let pf: Vec<f64> = p.iter().map(to_f64).collect();
        let zf: Vec<Vec<f64>> = closed.iter().map(|r| r.iter().map(to_f64).collect()).collect();
        let m = minimize_comass(&ev, &pf, &zf, opts)?;
        let mut beta = p;
        for (xi, z) in m.x.iter().zip(&closed) {
            let xi = dyadic(*xi, 40);
            beta.iter_mut().zip(z).for_each(|(a, b)| *a += &xi * b);
        }
        let c = crate::geometry::comass_with(&ev, &beta, opts.tol);
        // the cutting-plane lower bound still holds for the rounded witness
        let lo = m.lo.min(c.value.lower());
        return Ok(Primitive {
            cochain: Cochain::new(k - 1, beta),
            value: NormValue::Interval { lo, hi: c.value.upper() },
            estimate: c.estimate,
            certified: c.value.upper() - lo <= opts.tol * c.value.upper().max(f64::MIN_POSITIVE),
        });
    };
    let c = crate::geometry::comass_with(&ev, &beta, opts.tol);
    Ok(Primitive { cochain: Cochain::new(k - 1, beta), value: c.value, estimate: c.estimate, certified: c.certified })
}
