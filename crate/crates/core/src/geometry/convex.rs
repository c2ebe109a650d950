//! Cutting-plane solvers for comass problems. Every evaluated unit simple
//! k-vector `xi` gives a valid inequality `a(xi) <= comass(a)`, so the linear
//! programs below produce certified bounds on the side they relax.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::GeometryError;
use crate::geometry::comass::{dot_f64, ComassEvaluator};
use crate::geometry::GeometryOptions;

#[derive(Clone, Debug)]
pub struct Minimum {
    /// Coordinates of the minimizer along the given directions.
    pub x: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    pub iterations: usize,
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct Maximum {
    /// Maximizer, in the coordinates of the first group of directions.
    pub z: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    pub iterations: usize,
    pub certified: bool,
}

/// Gram-Schmidt in the metric inner product. Returns orthonormal directions
/// and, for each, its coefficients over the input directions.
fn orthonormal_combos(ev: &ComassEvaluator, dirs: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let p = dirs.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut images: Vec<Vec<f64>> = Vec::new();
    let mut combos: Vec<Vec<f64>> = Vec::new();
    for (i, d) in dirs.iter().enumerate() {
        let scale = ev.mass(d);
        let mut v = d.clone();
        let mut c = vec![0.0; p];
        c[i] = 1.0;
        for _ in 0..2 {
            let img = ev.orthonormal(&v);
            for (q, (qi, qc)) in images.iter().zip(out.iter().zip(&combos)) {
                let t = dot_f64(&img, q);
                v.iter_mut().zip(qi).for_each(|(x, y)| *x -= t * y);
                c.iter_mut().zip(qc).for_each(|(x, y)| *x -= t * y);
            }
        }
        let img = ev.orthonormal(&v);
        let n = dot_f64(&img, &img).sqrt();
        if n <= 1e-10 * scale.max(f64::MIN_POSITIVE) {
            continue;
        }
        out.push(v.iter().map(|x| x / n).collect());
        images.push(img.iter().map(|x| x / n).collect());
        combos.push(c.iter().map(|x| x / n).collect());
    }
    (out, combos)
}

fn combine(base: &[f64], dirs: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let mut a = base.to_vec();
    for (d, t) in dirs.iter().zip(y) {
        a.iter_mut().zip(d).for_each(|(x, v)| *x += t * v);
    }
    a
}

fn lp_err(e: impl std::fmt::Debug) -> GeometryError {
    GeometryError::Lp(format!("{e:?}"))
}

fn converged(lo: f64, hi: f64, tol: f64) -> bool {
    hi - lo <= tol * hi.abs().max(1e-300) + 1e-15
}

/// Minimize `comass(base + sum x_i dirs_i)`.
pub fn minimize_comass(
    ev: &ComassEvaluator,
    base: &[f64],
    dirs: &[Vec<f64>],
    opts: &GeometryOptions,
) -> Result<Minimum, GeometryError> {
    let e0 = ev.evaluate(base);
    let (ys, combos) = orthonormal_combos(ev, dirs);
    if ys.is_empty() {
        return Ok(Minimum {
            x: vec![0.0; dirs.len()],
            lo: e0.lo,
            hi: e0.hi,
            estimate: e0.lo,
            iterations: 0,
            certified: converged(e0.lo, e0.hi, opts.tol),
        });
    }
    // mass >= comass >= mass / sqrt(N) confines the minimizer to a ball
    let radius = ev.mass(base) + (ev.len() as f64).sqrt() * e0.hi;
    let mut cuts = vec![e0.cut.clone()];
    let (mut best_y, mut best_est, mut best_hi) = (vec![0.0; ys.len()], e0.lo, e0.hi);
    let mut lower = 0.0f64;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = ys.iter().map(|_| lp.add_var(0.0, (-radius, radius))).collect();
        let s = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        for w in &cuts {
            let mut terms: Vec<_> = vars.iter().zip(&ys).map(|(&v, d)| (v, dot_f64(d, w))).collect();
            terms.push((s, -1.0));
            lp.add_constraint(terms, ComparisonOp::Le, -dot_f64(base, w));
        }
        let sol = lp.solve().map_err(lp_err)?.into_solution().map_err(|_| lp_err("interrupted"))?;
        lower = lower.max(sol.objective());
        let y: Vec<f64> = vars.iter().map(|&v| sol.var_value(v)).collect();
        let e = ev.evaluate(&combine(base, &ys, &y));
        best_hi = best_hi.min(e.hi);
        if e.lo < best_est {
            best_est = e.lo;
            best_y = y;
        }
        cuts.push(e.cut);
        if converged(lower, best_est, opts.tol) {
            break;
        }
    }
    let mut x = vec![0.0; dirs.len()];
    for (t, c) in best_y.iter().zip(&combos) {
        x.iter_mut().zip(c).for_each(|(a, b)| *a += t * b);
    }
    let lo = lower.max(0.0).min(best_est);
    Ok(Minimum { x, lo, hi: best_hi, estimate: best_est, iterations, certified: converged(lo, best_hi, opts.tol) })
}

/// Maximize `ell . z` over `comass(sum z_i u_i + sum c_j b_j) <= 1`.
pub fn maximize_dual(
    ev: &ComassEvaluator,
    u: &[Vec<f64>],
    b: &[Vec<f64>],
    ell: &[f64],
    opts: &GeometryOptions,
) -> Result<Maximum, GeometryError> {
    let p = u.len();
    if ell.iter().all(|&x| x == 0.0) {
        return Ok(Maximum { z: vec![0.0; p], lo: 0.0, hi: 0.0, estimate: 0.0, iterations: 0, certified: true });
    }
    let all: Vec<Vec<f64>> = u.iter().chain(b).cloned().collect();
    let (ys, combos) = orthonormal_combos(ev, &all);
    let objective: Vec<f64> = combos.iter().map(|c| (0..p).map(|i| ell[i] * c[i]).sum()).collect();
    let radius = (ev.len() as f64).sqrt();
    let zero = vec![0.0; ev.len()];
    let mut cuts: Vec<Vec<f64>> = Vec::new();
    let (mut best_y, mut lower, mut estimate) = (vec![0.0; ys.len()], 0.0f64, 0.0f64);
    let mut upper = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = objective.iter().map(|&c| lp.add_var(c, (-radius, radius))).collect();
        for w in &cuts {
            let terms: Vec<_> = vars.iter().zip(&ys).map(|(&v, d)| (v, dot_f64(d, w))).collect();
            lp.add_constraint(terms, ComparisonOp::Le, 1.0);
        }
        let sol = lp.solve().map_err(lp_err)?.into_solution().map_err(|_| lp_err("interrupted"))?;
        upper = upper.min(sol.objective());
        let y: Vec<f64> = vars.iter().map(|&v| sol.var_value(v)).collect();
        let obj = dot_f64(&objective, &y);
        let e = ev.evaluate(&combine(&zero, &ys, &y));
        if e.hi > 0.0 && obj / e.hi > lower {
            lower = obj / e.hi;
        }
        if e.lo > 0.0 && obj / e.lo > estimate {
            estimate = obj / e.lo;
            best_y = y.iter().map(|t| t / e.lo).collect();
        }
        cuts.push(e.cut);
        if converged(estimate, upper, opts.tol) {
            break;
        }
    }
    let mut z = vec![0.0; p];
    for (t, c) in best_y.iter().zip(&combos) {
        z.iter_mut().zip(c).for_each(|(a, b)| *a += t * b);
    }
    let estimate = estimate.min(upper);
    Ok(Maximum { z, lo: lower, hi: upper, estimate, iterations, certified: converged(lower, upper, opts.tol) })
}
