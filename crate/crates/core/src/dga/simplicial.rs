use std::collections::{BTreeSet, HashMap};

use num_traits::One;

use crate::dga::model::{CochainModel, Origin, ProductTable};
use crate::error::ModelError;
use crate::linalg::RatMatrix;
use crate::rational::{rat, Rational};

/// Ordered simplicial complex; simplices are strictly increasing vertex tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: usize,
    by_dim: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    /// Validates that every listed tuple is increasing and every face is listed.
    pub fn new(simplices: &[Vec<usize>]) -> Result<Self, ModelError> {
        let all: BTreeSet<Vec<usize>> = simplices.iter().cloned().collect();
        for s in &all {
            check_increasing(s)?;
            for f in faces(s) {
                if !f.is_empty() && !all.contains(&f) {
                    return Err(ModelError::Invalid(format!("face {f:?} of {s:?} is missing")));
                }
            }
        }
        Ok(Self::from_set(all))
    }

    /// Downward closure of a list of simplices (typically the maximal ones).
    pub fn from_maximal(simplices: &[Vec<usize>]) -> Result<Self, ModelError> {
        let mut all = BTreeSet::new();
        let mut stack: Vec<Vec<usize>> = Vec::new();
        for s in simplices {
            let mut s = s.clone();
            s.sort_unstable();
            check_increasing(&s)?;
            stack.push(s);
        }
        while let Some(s) = stack.pop() {
            if s.is_empty() || !all.insert(s.clone()) {
                continue;
            }
            stack.extend(faces(&s));
        }
        Ok(Self::from_set(all))
    }

    fn from_set(all: BTreeSet<Vec<usize>>) -> Self {
        let top = all.iter().map(Vec::len).max().unwrap_or(1);
        let mut by_dim = vec![Vec::new(); top.max(1)];
        for s in all {
            by_dim[s.len() - 1].push(s);
        }
        for level in &mut by_dim {
            level.sort();
        }
        let vertices = by_dim[0].len();
        Self { vertices, by_dim }
    }

    /// Boundary of the standard `n`-simplex (a triangulated `(n-1)`-sphere).
    pub fn sphere_boundary(n: usize) -> Self {
        let full: Vec<usize> = (0..=n).collect();
        Self::from_maximal(&faces(&full)).expect("faces of a simplex are increasing")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.by_dim.len() - 1
    }

    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim.iter().enumerate().map(|(k, s)| if k % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) }).sum()
    }
}

fn check_increasing(s: &[usize]) -> Result<(), ModelError> {
    if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ModelError::Invalid(format!("simplex {s:?} is not a strictly increasing vertex tuple")));
    }
    Ok(())
}

fn faces(s: &[usize]) -> Vec<Vec<usize>> {
    (0..s.len()).map(|i| [&s[..i], &s[i + 1..]].concat()).collect()
}

/// Integer cochains with coboundary `(df)(v0..vk+1) = sum_i (-1)^i f(face_i)`
/// and front-face/back-face cup product.
pub fn build_simplicial_cochains(k: &SimplicialComplex, name: &str) -> Result<CochainModel, ModelError> {
    let top = k.dimension();
    let index: Vec<HashMap<&[usize], usize>> =
        (0..=top).map(|q| k.simplices(q).iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect()).collect();

    let mut d = Vec::with_capacity(top + 1);
    for q in 0..=top {
        let rows = if q < top { k.simplices(q + 1).len() } else { 0 };
        let mut m = RatMatrix::zeros(rows, k.simplices(q).len());
        if q < top {
            for (row, s) in k.simplices(q + 1).iter().enumerate() {
                for (i, f) in faces(s).iter().enumerate() {
                    let col = index[q][f.as_slice()];
                    m.set(row, col, rat(if i % 2 == 0 { 1 } else { -1 }));
                }
            }
        }
        d.push(m);
    }

    let mut products = ProductTable::new();
    for p in 0..=top {
        for q in 0..=top - p {
            let (sp, sq) = (k.simplices(p), k.simplices(q));
            let mut table = vec![Vec::new(); sp.len() * sq.len()];
            for (i, a) in sp.iter().enumerate() {
                for (j, b) in sq.iter().enumerate() {
                    if a.last() != b.first() {
                        continue;
                    }
                    let joined = [a.as_slice(), &b[1..]].concat();
                    if let Some(&t) = index[p + q].get(joined.as_slice()) {
                        table[i * sq.len() + j].push((t, Rational::one()));
                    }
                }
            }
            products.insert((p, q), table);
        }
    }

    let labels = (0..=top)
        .map(|q| {
            k.simplices(q)
                .iter()
                .map(|s| format!("[{}]", s.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
                .collect()
        })
        .collect();
    CochainModel::new(name, labels, d, products, None, false, Origin::Simplicial(k.clone()))
}

/// Minimal 7-vertex triangulation of the 2-torus.
pub fn minimal_torus() -> SimplicialComplex {
    let mut tris = Vec::new();
    for i in 0..7 {
        tris.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        tris.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    SimplicialComplex::from_maximal(&tris).expect("torus triangles are valid")
}

/// Six-vertex triangulation of the real projective plane.
pub fn projective_plane() -> SimplicialComplex {
    let tris = [
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 5, 1],
        [1, 2, 4],
        [2, 3, 5],
        [3, 4, 1],
        [4, 5, 2],
        [5, 1, 3],
    ];
    SimplicialComplex::from_maximal(&tris.map(|t| t.to_vec())).expect("RP2 triangles are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_and_euler() {
        let t = minimal_torus();
        assert_eq!(t.simplices(0).len(), 7);
        assert_eq!(t.simplices(1).len(), 21);
        assert_eq!(t.simplices(2).len(), 14);
        assert_eq!(t.euler_characteristic(), 0);
        assert_eq!(projective_plane().euler_characteristic(), 1);
        assert_eq!(SimplicialComplex::sphere_boundary(2).euler_characteristic(), 0);
    }

    #[test]
    fn missing_face_rejected() {
        assert!(SimplicialComplex::new(&[vec![0, 1]]).is_err());
        assert!(SimplicialComplex::new(&[vec![1, 0]]).is_err());
        assert!(SimplicialComplex::new(&[vec![0], vec![1], vec![0, 1]]).is_ok());
    }

    #[test]
    fn cochain_models_validate() {
        for (c, name) in [(minimal_torus(), "T2"), (projective_plane(), "RP2"), (SimplicialComplex::sphere_boundary(2), "S1")] {
            let m = build_simplicial_cochains(&c, name).unwrap();
            let r = m.validate().unwrap();
            assert!(r.is_valid(), "{name}: {r:?}");
            assert_eq!(r.graded_commutative, None);
        }
    }

    #[test]
    fn cup_front_back_rule() {
        let m = build_simplicial_cochains(&SimplicialComplex::from_maximal(&[vec![0, 1, 2]]).unwrap(), "simplex").unwrap();
        // edges in order [0,1], [0,2], [1,2]
        let f01 = m.basis_cochain(1, 0);
        let f12 = m.basis_cochain(1, 2);
        assert_eq!(m.wedge(&f01, &f12).unwrap().coeffs, vec![rat(1)]);
        assert!(m.wedge(&f12, &f01).unwrap().is_zero());
    }
}
