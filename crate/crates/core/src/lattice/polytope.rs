use num_traits::{One, Signed};

use crate::dga::exterior::binomial;
use crate::error::LatticeError;
use crate::lattice::norm::dedup_sign;
use crate::linalg::{dot, RatMatrix};
use crate::rational::Rational;

const MAX_SUBSETS: usize = 4_000_000;

/// Facet normals `f` (one per `+-` pair, `f . x = 1` on the facet) of the
/// centrally symmetric polytope `conv(+-points)`. By polarity these are also
/// the vertices of `{ x : |p . x| <= 1 for all p }`.
pub fn polar_normals(points: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, LatticeError> {
    let pts = dedup_sign(points.to_vec());
    let d = pts.first().map_or(0, Vec::len);
    if d == 0 || RatMatrix::from_rows(pts.clone())?.rank() != d {
        return Err(LatticeError::InvalidNorm("points do not span; the polytope is degenerate".into()));
    }
    let mut signed: Vec<Vec<Rational>> = Vec::with_capacity(2 * pts.len());
    for p in &pts {
        signed.push(p.clone());
        signed.push(p.iter().map(|x| -x).collect());
    }
    if binomial(signed.len(), d) > MAX_SUBSETS {
        return Err(LatticeError::InvalidNorm(format!(
            "facet enumeration over {} points in dimension {d} is too large",
            signed.len()
        )));
    }
    let ones = vec![Rational::one(); d];
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        // never pair a point with its own negative
        let clash = idx.windows(2).any(|w| w[0] / 2 == w[1] / 2);
        if !clash {
            let m = RatMatrix::from_rows(idx.iter().map(|&i| signed[i].clone()).collect())?;
            if let Ok(inv) = m.inverse() {
                let f = inv.mul_vec(&ones)?;
                if pts.iter().all(|p| dot(&f, p).abs() <= Rational::one()) {
                    out.push(f);
                }
            }
        }
        if !next_combination(&mut idx, signed.len()) {
            break;
        }
    }
    Ok(dedup_sign(out))
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn square_and_cross_polytope() {
        // conv(+-e1, +-e2) has facets +-x +-y = 1
        let cross = polar_normals(&[vec![rat(1), rat(0)], vec![rat(0), rat(1)]]).unwrap();
        assert_eq!(cross, vec![vec![rat(1), rat(-1)], vec![rat(1), rat(1)]]);
        let square = polar_normals(&cross).unwrap();
        assert_eq!(square, vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]]);
    }

    #[test]
    fn interior_points_are_ignored() {
        let f = polar_normals(&[vec![rat(1), rat(0)], vec![rat(0), rat(1)], vec![rat(0), rat(0)]]);
        assert!(f.is_err() || f.unwrap().len() == 2);
        let g = polar_normals(&[vec![rat(2), rat(0)], vec![rat(0), rat(2)], vec![rat(1), rat(0)]]).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(polar_normals(&[vec![rat(1), rat(1)]]).is_err());
    }
}
