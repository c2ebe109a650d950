//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see the lines.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use syswork_core::cohomology::{CohomologyRing, HomologyClass};
use syswork_core::dga::exterior::ExteriorBasis;
use syswork_core::dga::{
    build_chevalley_eilenberg, build_simplicial_cochains, minimal_torus, projective_plane, CochainModel, LieStructure,
    SimplicialComplex,
};
use syswork_core::geometry::{comass, isoperimetric_quotient, GeometryOptions, InvariantMetric, NormProfile};
use syswork_core::lattice::{successive_minima, transference_profile, NormOracle, NormedLattice};
use syswork_core::massey::{all_triples, integrality_check, massey_spanning_check, massey_triple};
use syswork_core::pipeline::{logspace, verify_chain_thm22, Selector};
use syswork_core::rational::{rat, ratio, to_f64};
use syswork_core::{PipelineError, RatMatrix, Rational};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn criterion(n: usize, name: &str, limit: f64, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panic: {}", msg.unwrap_or_default()))
    });
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = match out {
        Ok(d) if secs <= limit => (true, d),
        Ok(d) => (false, format!("{d}; too slow")),
        Err(e) => (false, e),
    };
    println!("criterion {n} {} {name} ({secs:.2}s of {limit}s): {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn ce(lie: &LieStructure, name: &str) -> CochainModel {
    build_chevalley_eilenberg(lie, name).unwrap()
}

/// Random nilpotent algebra: `[e_a, e_b]` only lands on generators of higher index.
fn random_nilpotent(rng: &mut ChaCha8Rng, dim: usize) -> Option<LieStructure> {
    let mut entries = Vec::new();
    for k in 2..dim {
        for _ in 0..rng.random_range(0..3) {
            let a = rng.random_range(0..k);
            let b = rng.random_range(0..k);
            if a == b {
                continue;
            }
            let (a, b) = (a.min(b), a.max(b));
            if entries.iter().any(|&(x, y, z, _)| (x, y, z) == (a, b, k)) {
                continue;
            }
            entries.push((a, b, k, rat(rng.random_range(-2..=2))));
        }
    }
    LieStructure::from_entries(dim, &entries).ok()
}

fn c1_dga_validity() -> Check {
    let mut models = Vec::new();
    for n in 1..=6 {
        models.push(ce(&LieStructure::abelian(n), "abelian"));
    }
    models.push(ce(&LieStructure::heisenberg(), "heisenberg"));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nil = 0;
    while nil < 12 {
        let dim = rng.random_range(3..=6);
        if let Some(lie) = random_nilpotent(&mut rng, dim) {
            models.push(ce(&lie, "nilpotent"));
            nil += 1;
        }
    }
    models.push(build_simplicial_cochains(&minimal_torus(), "torus").unwrap());
    models.push(build_simplicial_cochains(&projective_plane(), "rp2").unwrap());
    models.push(build_simplicial_cochains(&SimplicialComplex::sphere_boundary(3), "s2").unwrap());
    let mut checks = 0;
    for m in &models {
        let v = m.validate().map_err(|e| e.to_string())?;
        ensure!(v.is_valid(), "{}: {:?}", m.name(), v.failures);
        checks += v.checks;
        // d^2 = 0 straight from the matrices
        for k in 0..m.top_degree().saturating_sub(1) {
            ensure!(m.differential(k + 1).mul(m.differential(k)).unwrap().is_zero(), "{}: d_{} d_{k}", m.name(), k + 1);
        }
        // Euler characteristic from cochain dimensions
        let ring = CohomologyRing::compute(m).map_err(|e| e.to_string())?;
        let chi: i64 = m.dims().iter().enumerate().map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) }).sum();
        ensure!(chi == ring.euler_characteristic(), "{}: Euler characteristic", m.name());
    }
    for n in 1..=6 {
        let ring = CohomologyRing::compute(&models[n - 1]).unwrap();
        let binom: Vec<usize> = (0..=n).map(|k| (0..k).fold(1, |a, i| a * (n - i) / (i + 1))).collect();
        ensure!(ring.betti_numbers() == binom, "abelian {n}: Betti");
    }
    Ok(format!("{} models, {checks} exact checks", models.len()))
}

fn c2_heisenberg() -> Check {
    let ring = CohomologyRing::compute(&ce(&LieStructure::heisenberg(), "heisenberg")).unwrap();
    ensure!(ring.betti_numbers() == vec![1, 2, 2, 1], "Betti {:?}", ring.betti_numbers());
    ensure!(ring.cup_is_zero_on_degree(1), "cup on H^1 is nonzero");
    let e1 = ring.basis_class(1, 0);
    let e2 = ring.basis_class(1, 1);
    let mut values = Vec::new();
    for (u, v, w) in [(&e1, &e1, &e2), (&e2, &e2, &e1)] {
        let c = massey_triple(&ring, u, v, w).map_err(|e| e.to_string())?;
        ensure!(c.indet.dim() == 0 && c.is_nontrivial(), "triple trivial or indeterminate");
        // pair with the homology basis; exactly one entry is nonzero
        let pairings: Vec<_> = (0..2)
            .map(|i| {
                let mut coords = vec![rat(0); 2];
                coords[i] = rat(1);
                integrality_check(&ring, &c, &HomologyClass { degree: 2, coords }).unwrap()
            })
            .collect();
        let nonzero: Vec<_> = pairings.iter().filter(|p| !p.is_zero()).collect();
        ensure!(nonzero.len() == 1 && nonzero[0].abs().is_one(), "pairings {pairings:?}");
        values.push(nonzero[0].to_string());
    }
    let span = massey_spanning_check(&ring, 1).map_err(|e| e.to_string())?;
    ensure!(span.sufficient, "spanning check false");
    Ok(format!("pairings {values:?}"))
}

fn c3_torus() -> Check {
    let ring = CohomologyRing::compute(&ce(&LieStructure::abelian(3), "torus")).unwrap();
    ensure!(!ring.cup_is_zero_on_degree(1), "cup product vanishes on the torus");
    let triples = all_triples(&ring, 1).map_err(|e| e.to_string())?;
    let defined = triples.iter().filter(|t| t.defined).count();
    ensure!(triples.iter().all(|t| !t.defined || t.nontrivial == Some(false)), "a defined triple avoids 0");
    match verify_chain_thm22(&ring, &InvariantMetric::identity(3), 1, &GeometryOptions::default()) {
        Err(PipelineError::Hypothesis(msg)) => Ok(format!("{defined} defined triples contain 0; refused: {msg}")),
        other => Err(format!("expected refusal, got {:?}", other.map(|r| r.passed))),
    }
}

fn rand_rational_gram(rng: &mut ChaCha8Rng, n: usize) -> RatMatrix {
    // A^T A + I over a random denominator: positive definite
    let a: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-2..=2)).collect()).collect();
    let d = rng.random_range(1..=4);
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let s: i64 = (0..n).map(|k| a[k][i] * a[k][j]).sum::<i64>() + i64::from(i == j);
                    ratio(s, d)
                })
                .collect()
        })
        .collect();
    RatMatrix::from_rows(rows).unwrap()
}

fn rand_basis(rng: &mut ChaCha8Rng, n: usize) -> RatMatrix {
    loop {
        let rows: Vec<Vec<Rational>> = (0..n).map(|_| (0..n).map(|_| rat(rng.random_range(-3..=3))).collect()).collect();
        let m = RatMatrix::from_rows(rows).unwrap();
        if m.rank() == n {
            return m;
        }
    }
}

fn quad(g: &RatMatrix, v: &[Rational]) -> Rational {
    let n = v.len();
    let mut s = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            s += &v[i] * g.get(i, j) * &v[j];
        }
    }
    s
}

/// Squared minima by listing every lattice point in a ball that must contain
/// a full set of minima, then taking the greedy independent prefix.
fn ball_minima(basis: &RatMatrix, g: &RatMatrix) -> Vec<Rational> {
    let n = basis.rows();
    let rows: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| basis.get(i, j).clone()).collect()).collect();
    let r2 = rows.iter().map(|v| quad(g, v)).max().unwrap();
    // coefficient form C = B G B^T; the ellipsoid z^T C z <= r2 lies in |z_i| <= sqrt(r2 (C^-1)_ii)
    let c: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| to_f64(&quad_pair(g, &rows[i], &rows[j]))).collect()).collect();
    let cm = nalgebra::DMatrix::from_fn(n, n, |i, j| c[i][j]);
    let ci = cm.clone().try_inverse().unwrap();
    let r2f = to_f64(&r2);
    let bounds: Vec<i64> = (0..n).map(|i| ((r2f * ci[(i, i)]).sqrt() * (1.0 + 1e-6) + 1e-6).floor() as i64).collect();
    let mut pts: Vec<(Rational, Vec<i64>)> = Vec::new();
    let mut z: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        if z.iter().any(|&x| x != 0) {
            let zf = nalgebra::DVector::from_fn(n, |i, _| z[i] as f64);
            if (zf.transpose() * &cm * &zf)[(0, 0)] <= r2f * (1.0 + 1e-9) + 1e-9 {
                let v: Vec<Rational> = (0..n)
                    .map(|j| (0..n).map(|i| rat(z[i]) * basis.get(i, j)).fold(Rational::zero(), |a, b| a + b))
                    .collect();
                let q = quad(g, &v);
                if q <= r2 {
                    pts.push((q, z.clone()));
                }
            }
        }
        let mut i = 0;
        while i < n {
            z[i] += 1;
            if z[i] <= bounds[i] {
                break;
            }
            z[i] = -bounds[i];
            i += 1;
        }
        if i == n {
            break;
        }
    }
    pts.sort();
    let mut chosen: Vec<Vec<Rational>> = Vec::new();
    let mut out = Vec::new();
    for (q, z) in pts {
        let mut cand = chosen.clone();
        cand.push(z.iter().map(|&x| rat(x)).collect());
        if RatMatrix::from_rows(cand.clone()).unwrap().rank() == cand.len() {
            chosen = cand;
            out.push(q);
            if out.len() == n {
                break;
            }
        }
    }
    out
}

fn quad_pair(g: &RatMatrix, u: &[Rational], v: &[Rational]) -> Rational {
    let n = u.len();
    let mut s = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            s += &u[i] * g.get(i, j) * &v[j];
        }
    }
    s
}

fn c4_minima_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..50 {
        let n = rng.random_range(1..=4);
        let basis = rand_basis(&mut rng, n);
        let g = rand_rational_gram(&mut rng, n);
        let l = NormedLattice::new(basis.clone(), NormOracle::quadratic(g.clone()).unwrap()).unwrap();
        let got: Vec<Rational> = successive_minima(&l).map_err(|e| e.to_string())?.lambdas.iter().map(|x| x.square().unwrap()).collect();
        let want = ball_minima(&basis, &g);
        ensure!(got == want, "case {case}: {got:?} vs {want:?}");
    }
    Ok("50 lattices agree exactly".into())
}

fn c5_transference() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_euclid: f64 = 0.0;
    let mut worst_general: f64 = 0.0;
    for _ in 0..30 {
        let n = rng.random_range(1..=4);
        let l = NormedLattice::new(rand_basis(&mut rng, n), NormOracle::euclidean(n)).unwrap();
        let t = transference_profile(&l).map_err(|e| e.to_string())?;
        ensure!(t.all_at_least_one(), "product below 1");
        let r = t.first_times_last.to_f64();
        ensure!(r <= n as f64 + 1e-12, "lambda_1 Lambda* = {r} > b = {n}");
        worst_euclid = worst_euclid.max(r / n as f64);
    }
    for _ in 0..10 {
        let n = rng.random_range(1..=4);
        let d: Vec<Rational> = (0..n).map(|_| ratio(rng.random_range(1..=9), rng.random_range(1..=3))).collect();
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { d[i].clone() } else { rat(0) }).collect()).collect();
        let l = NormedLattice::new(RatMatrix::from_rows(rows).unwrap(), NormOracle::euclidean(n)).unwrap();
        let t = transference_profile(&l).map_err(|e| e.to_string())?;
        ensure!(t.all_equal_one(), "diagonal lattice with a product != 1");
    }
    for i in 0..30 {
        let n = rng.random_range(1..=4);
        let norm = match i % 3 {
            0 => NormOracle::l1(n),
            1 => NormOracle::linf(n),
            _ => NormOracle::quadratic(rand_rational_gram(&mut rng, n)).unwrap(),
        };
        let l = NormedLattice::new(rand_basis(&mut rng, n), norm).unwrap();
        let t = transference_profile(&l).map_err(|e| e.to_string())?;
        ensure!(t.all_at_least_one(), "product below 1 for a general norm");
        let ratio = t.first_times_last.to_f64() / t.normalizer;
        ensure!(ratio <= 10.0, "ratio {ratio} above the envelope");
        worst_general = worst_general.max(ratio);
    }
    Ok(format!("max lambda_1 Lambda*/b = {worst_euclid:.4}; max ratio/(b(1+ln b)) = {worst_general:.4}"))
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    ExteriorBasis::new(n).position((1 << a) | (1 << b))
}

fn c6_norm_layer() -> Check {
    let opts = GeometryOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // flat torus: stable norm of x in H_1 is the length of sum x_i l_i e_i
    let torus = CohomologyRing::compute(&ce(&LieStructure::abelian(3), "torus")).unwrap();
    let ls = [rat(1), ratio(3, 2), rat(2)];
    let g = InvariantMetric::diagonal(&ls.iter().map(|l| l * l).collect::<Vec<_>>()).unwrap();
    let p1 = NormProfile::new(&torus, &g, 1, &opts).unwrap();
    for _ in 0..20 {
        let x: Vec<i64> = (0..3).map(|_| rng.random_range(-4..=4)).collect();
        let want: f64 = x.iter().zip(&ls).map(|(&xi, l)| (xi as f64 * to_f64(l)).powi(2)).sum::<f64>().sqrt();
        let got = p1.stable_norm(&x.iter().map(|&v| rat(v)).collect::<Vec<_>>()).unwrap().value.to_f64();
        ensure!((got - want).abs() <= 1e-9, "stable norm {got} vs {want}");
    }
    // duality: <a, h> <= |a|_min-comass |h|_stable on a non-diagonal 4-torus in degree 2
    let t4 = CohomologyRing::compute(&ce(&LieStructure::abelian(4), "torus4")).unwrap();
    let g4 = InvariantMetric::new(
        RatMatrix::from_rows(vec![
            vec![rat(2), rat(1), rat(0), rat(0)],
            vec![rat(1), rat(3), rat(1), rat(0)],
            vec![rat(0), rat(1), rat(2), ratio(1, 2)],
            vec![rat(0), rat(0), ratio(1, 2), rat(1)],
        ])
        .unwrap(),
    )
    .unwrap();
    let p2 = NormProfile::new(&t4, &g4, 2, &opts).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a: Vec<Rational> = (0..6).map(|_| rat(rng.random_range(-3..=3))).collect();
        let h: Vec<Rational> = (0..6).map(|_| rat(rng.random_range(-3..=3))).collect();
        if a.iter().all(Zero::is_zero) || h.iter().all(Zero::is_zero) {
            continue;
        }
        let class = t4.class_from_integral(2, &a).unwrap();
        let pairing = to_f64(&t4.pair_with_homology(&class, &HomologyClass { degree: 2, coords: h.clone() }).unwrap());
        let bound = p2.min_comass(&a).unwrap().value.to_f64() * p2.stable_norm(&h).unwrap().value.to_f64();
        worst = worst.max(pairing.abs() / bound - 1.0);
    }
    ensure!(worst <= 1e-6, "duality defect {worst}");
    // canonical 2-forms a e12 + b e34 + c e56: comass max |coefficient|
    let id6 = InvariantMetric::identity(6);
    for _ in 0..20 {
        let co: Vec<i64> = (0..3).map(|_| rng.random_range(-9..=9)).collect();
        let mut f = vec![rat(0); 15];
        for (i, &c) in co.iter().enumerate() {
            f[pair_index(6, 2 * i, 2 * i + 1)] = rat(c);
        }
        let got = comass(&id6, 2, &f, &opts).value.to_f64();
        let want = co.iter().map(|c| c.abs()).max().unwrap() as f64;
        ensure!((got - want).abs() <= 1e-9, "comass {got} vs {want}");
    }
    // IQ_2 on Heisenberg diag(1,1,t) against a 2-parameter scan of primitives -e3 + a e1 + b e2
    let h = CohomologyRing::compute(&ce(&LieStructure::heisenberg(), "heisenberg")).unwrap();
    for t in [ratio(1, 4), rat(1), rat(4)] {
        let g = InvariantMetric::diagonal(&[rat(1), rat(1), t.clone()]).unwrap();
        let iq = isoperimetric_quotient(&h, &g, 2, &opts).unwrap().value.to_f64();
        let tf = to_f64(&t);
        let steps = 400;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                let a = -1.0 + 2.0 * i as f64 / steps as f64;
                let b = -1.0 + 2.0 * j as f64 / steps as f64;
                best = best.min((a * a + b * b + 1.0 / tf).sqrt());
            }
        }
        ensure!((iq - best).abs() <= 1e-6, "IQ_2 at t = {t}: {iq} vs scan {best}");
    }
    Ok(format!("worst duality defect {worst:.2e}"))
}

fn c7_thm22_chain() -> Check {
    let ring = CohomologyRing::compute(&ce(&LieStructure::heisenberg(), "heisenberg")).unwrap();
    let opts = GeometryOptions::default();
    let mut margins = Vec::new();
    for t in logspace(-2.0, 2.0, 9) {
        let g = InvariantMetric::diagonal(&[rat(1), rat(1), t.clone()]).unwrap();
        let r = verify_chain_thm22(&ring, &g, 1, &opts).map_err(|e| e.to_string())?;
        ensure!(r.selector == Selector::Thm22.name(), "selector");
        ensure!(r.triple.as_ref().is_some_and(|x| x.pairing.abs() >= 1), "integrality floor");
        ensure!(r.primitives.iter().all(|p| p.holds), "primitive bound fails at t = {t}");
        for l in &r.chain {
            ensure!(l.margin >= 0.0, "{} fails at t = {t}: margin {}", l.step, l.margin);
        }
        let m = r.dimensionless_margin.unwrap();
        let r4 = verify_chain_thm22(&ring, &g.scaled(&rat(4)).unwrap(), 1, &opts).map_err(|e| e.to_string())?;
        ensure!((m - r4.dimensionless_margin.unwrap()).abs() <= 1e-6, "scaling changes the margin at t = {t}");
        margins.push(m);
    }
    Ok(format!("dimensionless margins {margins:?}"))
}

fn c8_determinism() -> Check {
    let models = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_syswork"))
            .args(["verify", "thm22", "heisenberg.json", "--seed", "7"])
            .current_dir(&models)
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    ensure!(a.status.code() == Some(0), "exit {:?}", a.status.code());
    ensure!(!a.stdout.is_empty() && a.stdout == b.stdout, "reports differ");
    Ok(format!("{} identical bytes", a.stdout.len()))
}

#[test]
fn acceptance() {
    let results = [
        criterion(1, "DGA validity", 5.0, c1_dga_validity),
        criterion(2, "Heisenberg benchmark", 1.0, c2_heisenberg),
        criterion(3, "torus negative controls", 1.0, c3_torus),
        criterion(4, "successive minima vs ball enumeration", 60.0, c4_minima_oracle),
        criterion(5, "transference", 120.0, c5_transference),
        criterion(6, "norm layer", 120.0, c6_norm_layer),
        criterion(7, "triple-Massey chain on Heisenberg", 180.0, c7_thm22_chain),
        criterion(8, "determinism", 60.0, c8_determinism),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
