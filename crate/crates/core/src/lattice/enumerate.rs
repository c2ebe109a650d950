//! Fincke-Pohst enumeration of integer vectors in an ellipsoid.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::LatticeError;

/// Factored form `Q(z) = sum_i q_ii (z_i + sum_{j>i} q_ij z_j)^2` of a
/// positive definite Gram matrix.
fn factor(gram: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, LatticeError> {
    let n = gram.len();
    let mut q = gram.to_vec();
    for i in 0..n {
        if q[i][i] <= 0.0 || !q[i][i].is_finite() {
            return Err(LatticeError::Degenerate { rank: i, dim: n });
        }
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    Ok(q)
}

/// All nonzero `z` with first nonzero entry positive and `z^T G z <= r2`,
/// sorted lexicographically. The bound is widened by a relative `1e-9` so
/// rounding cannot drop boundary points; callers filter exactly.
pub fn enumerate_ellipsoid(gram: &[Vec<f64>], r2: f64, budget: usize) -> Result<Vec<Vec<i64>>, LatticeError> {
    let n = gram.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let q = factor(gram)?;
    let bound = r2 * (1.0 + 1e-9) + 1e-12;
    let counter = AtomicUsize::new(0);
    let top = n - 1;
    let span = (bound / q[top][top]).sqrt();
    let lo = (-span).ceil() as i64;
    let hi = span.floor() as i64;
    let chunks: Vec<Result<Vec<Vec<i64>>, LatticeError>> = (lo..=hi)
        .into_par_iter()
        .map(|zt| {
            let mut z = vec![0i64; n];
            z[top] = zt;
            let used = q[top][top] * (zt as f64).powi(2);
            let mut out = Vec::new();
            recurse(&q, top, &mut z, bound - used, budget, &counter, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for c in chunks {
        all.extend(c?);
    }
    all.retain(|z| z.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0));
    all.sort();
    Ok(all)
}

fn recurse(
    q: &[Vec<f64>],
    level: usize,
    z: &mut Vec<i64>,
    remaining: f64,
    budget: usize,
    counter: &AtomicUsize,
    out: &mut Vec<Vec<i64>>,
) -> Result<(), LatticeError> {
    if level == 0 {
        if counter.fetch_add(1, Ordering::Relaxed) >= budget {
            return Err(LatticeError::BudgetExceeded { budget, radius: 0.0 });
        }
        if z.iter().any(|&x| x != 0) {
            out.push(z.clone());
        }
        return Ok(());
    }
    let i = level - 1;
    let n = q.len();
    let center: f64 = -(i + 1..n).map(|j| q[i][j] * z[j] as f64).sum::<f64>();
    let span = (remaining.max(0.0) / q[i][i]).sqrt();
    let lo = (center - span).ceil() as i64;
    let hi = (center + span).floor() as i64;
    for zi in lo..=hi {
        let t = zi as f64 - center;
        let used = q[i][i] * t * t;
        if used > remaining {
            continue;
        }
        z[i] = zi;
        recurse(q, i, z, remaining - used, budget, counter, out)?;
    }
    z[i] = 0;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_of_z2() {
        let g = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let pts = enumerate_ellipsoid(&g, 1.0, 1000).unwrap();
        assert_eq!(pts, vec![vec![0, 1], vec![1, 0]]);
        let pts = enumerate_ellipsoid(&g, 2.0, 1000).unwrap();
        assert_eq!(pts.len(), 4);
    }

    #[test]
    fn budget_is_enforced() {
        let g = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(matches!(enumerate_ellipsoid(&g, 1e4, 100), Err(LatticeError::BudgetExceeded { .. })));
    }

    #[test]
    fn matches_box_search() {
        let g = vec![vec![2.0, 1.0, 0.0], vec![1.0, 3.0, -1.0], vec![0.0, -1.0, 2.5]];
        let r2 = 7.0;
        let pts = enumerate_ellipsoid(&g, r2, 100_000).unwrap();
        let mut brute = Vec::new();
        for a in -5i64..=5 {
            for b in -5i64..=5 {
                for c in -5i64..=5 {
                    let z = [a as f64, b as f64, c as f64];
                    let v: f64 = (0..3).map(|i| (0..3).map(|j| z[i] * g[i][j] * z[j]).sum::<f64>()).sum();
                    let first = [a, b, c].into_iter().find(|&x| x != 0);
                    if v <= r2 && first.is_some_and(|x| x > 0) {
                        brute.push(vec![a, b, c]);
                    }
                }
            }
        }
        brute.sort();
        assert_eq!(pts, brute);
    }
}
