use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use syswork_core::dga::{build_chevalley_eilenberg, LieStructure};
use syswork_core::geometry::{comass, GeometryOptions, InvariantMetric};
use syswork_core::lattice::{successive_minima, transference_profile, NormOracle, NormedLattice};
use syswork_core::linalg::{smith_normal_form, IntMatrix};
use syswork_core::rational::{rat, to_f64};
use syswork_core::{Cochain, RatMatrix, Rational};

fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, cols), rows)
}

fn rat_matrix(m: &[Vec<i64>]) -> RatMatrix {
    RatMatrix::from_rows(m.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smith_form_factors_and_divides(m in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| int_matrix(r, c))) {
        let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
        let a = IntMatrix::from_i64(&rows);
        let s = smith_normal_form(&a);
        prop_assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d.clone());
        let diag = s.diagonal();
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                prop_assert!(!w[0].is_zero() && (&w[1] % &w[0]).is_zero());
            }
            prop_assert!(!w[0].is_negative());
        }
        prop_assert!(s.u.determinant().unwrap().abs() == BigInt::from(1));
        prop_assert!(s.v.determinant().unwrap().abs() == BigInt::from(1));
    }

    #[test]
    fn wedge_is_graded_commutative(a in prop::collection::vec(-3i64..=3, 6), b in prop::collection::vec(-3i64..=3, 4)) {
        // degree 2 and degree 1 cochains on R^4
        let m = build_chevalley_eilenberg(&LieStructure::abelian(4), "t4").unwrap();
        let x = Cochain::new(2, a.iter().map(|&v| rat(v)).collect());
        let y = Cochain::new(1, b.iter().map(|&v| rat(v)).collect());
        prop_assert_eq!(m.wedge(&x, &y).unwrap(), m.wedge(&y, &x).unwrap());
        let z = Cochain::new(1, b.iter().rev().map(|&v| rat(v)).collect());
        prop_assert_eq!(m.wedge(&z, &y).unwrap(), m.wedge(&y, &z).unwrap().scaled(&rat(-1)));
    }

    #[test]
    fn minima_ignore_basis_change(m in int_matrix(3, 3), u in -3i64..=3, v in -3i64..=3) {
        let b = rat_matrix(&m);
        prop_assume!(b.rank() == 3);
        // unimodular row operations: r0 += u r1, r2 += v r0
        let mut rows = b.to_rows();
        for j in 0..3 {
            rows[0][j] = &rows[0][j] + rat(u) * &rows[1][j];
        }
        for j in 0..3 {
            rows[2][j] = &rows[2][j] + rat(v) * &rows[0][j];
        }
        let c = RatMatrix::from_rows(rows).unwrap();
        let l1 = NormedLattice::new(b, NormOracle::euclidean(3)).unwrap();
        let l2 = NormedLattice::new(c, NormOracle::euclidean(3)).unwrap();
        let a = successive_minima(&l1).unwrap().lambdas;
        let b = successive_minima(&l2).unwrap().lambdas;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn minima_scale_and_transfer(m in int_matrix(2, 2), c in 1i64..=5) {
        let b = rat_matrix(&m);
        prop_assume!(b.rank() == 2);
        for norm in [NormOracle::euclidean(2), NormOracle::l1(2), NormOracle::linf(2)] {
            let l = NormedLattice::new(b.clone(), norm).unwrap();
            let base = successive_minima(&l).unwrap().lambdas;
            let scaled = successive_minima(&l.scaled(&rat(c))).unwrap().lambdas;
            for (x, y) in base.iter().zip(&scaled) {
                prop_assert!((y.to_f64() - c as f64 * x.to_f64()).abs() < 1e-9);
            }
            prop_assert!(transference_profile(&l).unwrap().all_at_least_one());
        }
    }

    #[test]
    fn comass_is_a_norm(a in prop::collection::vec(-4i64..=4, 6), b in prop::collection::vec(-4i64..=4, 6), c in -3i64..=3, d in 1i64..=4) {
        let g = InvariantMetric::diagonal(&[rat(1), rat(d), rat(2), rat(1)]).unwrap();
        let opts = GeometryOptions::default();
        let x: Vec<Rational> = a.iter().map(|&v| rat(v)).collect();
        let y: Vec<Rational> = b.iter().map(|&v| rat(v)).collect();
        let s: Vec<Rational> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
        let cx: Vec<Rational> = x.iter().map(|p| p * rat(c)).collect();
        let nx = comass(&g, 2, &x, &opts).value.to_f64();
        let ny = comass(&g, 2, &y, &opts).value.to_f64();
        prop_assert!(comass(&g, 2, &s, &opts).value.to_f64() <= nx + ny + 1e-9);
        prop_assert!((comass(&g, 2, &cx, &opts).value.to_f64() - (c.abs() as f64) * nx).abs() < 1e-9);
        // comass never exceeds mass
        let ev = syswork_core::geometry::ComassEvaluator::new(&g, 2, &opts);
        let xf: Vec<f64> = x.iter().map(to_f64).collect();
        prop_assert!(nx <= ev.mass(&xf) + 1e-9);
    }
}
