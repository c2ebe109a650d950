//! Index bookkeeping for exterior algebras on `n` generators.
//!
//! A monomial `e^{i1} ^ ... ^ e^{ik}` with `i1 < ... < ik` is a bitmask;
//! degree-`k` monomials are ordered lexicographically by index tuple.

use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorBasis {
    n: usize,
    by_degree: Vec<Vec<u32>>,
    index: HashMap<u32, usize>,
}

impl ExteriorBasis {
    pub fn new(n: usize) -> Self {
        assert!(n <= 24, "exterior algebra on {n} generators is out of range");
        let mut by_degree = Vec::with_capacity(n + 1);
        let mut index = HashMap::new();
        for k in 0..=n {
            let masks = combinations(n, k);
            for (i, &m) in masks.iter().enumerate() {
                index.insert(m, i);
            }
            by_degree.push(masks);
        }
        Self { n, by_degree, index }
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn dim(&self, k: usize) -> usize {
        self.by_degree.get(k).map_or(0, Vec::len)
    }

    pub fn masks(&self, k: usize) -> &[u32] {
        &self.by_degree[k]
    }

    pub fn mask(&self, k: usize, i: usize) -> u32 {
        self.by_degree[k][i]
    }

    /// Position of a monomial within its degree.
    pub fn position(&self, mask: u32) -> usize {
        self.index[&mask]
    }

    pub fn label(&self, mask: u32) -> String {
        if mask == 0 {
            return "1".to_string();
        }
        indices(mask).iter().map(|i| format!("e{}", i + 1)).collect::<Vec<_>>().join("^")
    }
}

/// Generator indices of a monomial, ascending.
pub fn indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// `e^a ^ e^b = sign * e^{a|b}`, or `None` when the monomials share a generator.
pub fn monomial_wedge(a: u32, b: u32) -> Option<(i32, u32)> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        // generators of `a` above j must move past e^j
        let above = if j >= 31 { 0 } else { a & !((1u32 << (j + 1)) - 1) };
        swaps += above.count_ones();
    }
    Some((if swaps % 2 == 0 { 1 } else { -1 }, a | b))
}

/// Sign of the shuffle `(A, complement of A)` in `{0..n}`: `e^A ^ e^{A^c} = sign * e^{all}`.
pub fn complement_sign(mask: u32, n: usize) -> i32 {
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    monomial_wedge(mask, all & !mask).map_or(0, |(s, _)| s)
}

fn combinations(n: usize, k: usize) -> Vec<u32> {
    fn rec(start: usize, n: usize, k: usize, acc: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            rec(i + 1, n, k - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, 0, &mut out);
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
