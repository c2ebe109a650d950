use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::dga::{LieStructure, SimplicialComplex};
use crate::error::ModelError;
use crate::linalg::{axpy, is_zero_vec, smith_normal_form, IntMatrix, RatMatrix, Subspace};
use crate::rational::{format_rational, Rational};

/// Sparse structure tensor of the product: for degrees `(k, l)` and basis
/// indices `(i, j)`, entry `i * dim(l) + j` lists `(index, coefficient)` of
/// `basis_k[i] * basis_l[j]` in degree `k + l`.
pub type ProductTable = BTreeMap<(usize, usize), Vec<Vec<(usize, Rational)>>>;

#[derive(Clone, Debug, PartialEq)]
pub enum Origin {
    Lie(LieStructure),
    Simplicial(SimplicialComplex),
    Custom,
}

/// An element of one graded piece of a [`CochainModel`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cochain {
    pub degree: usize,
    pub coeffs: Vec<Rational>,
}

impl Cochain {
    pub fn new(degree: usize, coeffs: Vec<Rational>) -> Self {
        Self { degree, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.coeffs)
    }

    pub fn scaled(&self, c: &Rational) -> Cochain {
        Cochain::new(self.degree, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        debug_assert_eq!(self.degree, other.degree);
        Cochain::new(self.degree, self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        debug_assert_eq!(self.degree, other.degree);
        Cochain::new(self.degree, self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn axpy(&mut self, c: &Rational, other: &Cochain) {
        axpy(&mut self.coeffs, c, &other.coeffs);
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(crate::rational::to_f64).collect()
    }
}

/// Outcome of the exhaustive structural check of a model.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ValidityReport {
    pub d_squared_zero: bool,
    pub leibniz: bool,
    pub associative: bool,
    /// `None` for models not declared graded-commutative.
    pub graded_commutative: Option<bool>,
    pub lattice_closed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.d_squared_zero
            && self.leibniz
            && self.associative
            && self.graded_commutative.unwrap_or(true)
            && self.lattice_closed
    }
}

/// Finite-dimensional differential graded algebra with a marked integral
/// lattice in each degree.
#[derive(Clone, Debug, PartialEq)]
pub struct CochainModel {
    name: String,
    top: usize,
    labels: Vec<Vec<String>>,
    d: Vec<RatMatrix>,
    products: ProductTable,
    /// Rows are lattice basis vectors in standard coordinates.
    lattice: Vec<RatMatrix>,
    /// `(L^T)^{-1}`: standard coordinates -> lattice coordinates.
    lattice_to_coords: Vec<Option<RatMatrix>>,
    commutative: bool,
    origin: Origin,
}

impl CochainModel {
    /// Assembles a model after shape checks; call [`CochainModel::validate`]
    /// for the algebraic identities.
    pub fn new(
        name: impl Into<String>,
        labels: Vec<Vec<String>>,
        d: Vec<RatMatrix>,
        products: ProductTable,
        lattice: Option<Vec<RatMatrix>>,
        commutative: bool,
        origin: Origin,
    ) -> Result<Self, ModelError> {
        if labels.is_empty() {
            return Err(ModelError::Invalid("model has no degrees".into()));
        }
        let top = labels.len() - 1;
        let dims: Vec<usize> = labels.iter().map(Vec::len).collect();
        if d.len() != top + 1 {
            return Err(ModelError::Invalid(format!("expected {} differentials, got {}", top + 1, d.len())));
        }
        for (k, m) in d.iter().enumerate() {
            let rows = if k < top { dims[k + 1] } else { 0 };
            if m.rows() != rows || m.cols() != dims[k] {
                return Err(ModelError::Invalid(format!(
                    "d_{k} has shape {}x{}, expected {rows}x{}",
                    m.rows(),
                    m.cols(),
                    dims[k]
                )));
            }
        }
        for (&(k, l), table) in &products {
            if k + l > top || table.len() != dims[k] * dims[l] {
                return Err(ModelError::Invalid(format!("product table ({k},{l}) has wrong shape")));
            }
            if table.iter().flatten().any(|(idx, _)| *idx >= dims[k + l]) {
                return Err(ModelError::Invalid(format!("product table ({k},{l}) indexes past degree {}", k + l)));
            }
        }
        let lattice = match lattice {
            Some(l) => {
                if l.len() != top + 1 {
                    return Err(ModelError::Invalid("integral lattice must list every degree".into()));
                }
                for (k, b) in l.iter().enumerate() {
                    if b.rows() != dims[k] || b.cols() != dims[k] {
                        return Err(ModelError::Invalid(format!("integral lattice in degree {k} is not square")));
                    }
                }
                l
            }
            None => dims.iter().map(|&n| RatMatrix::identity(n)).collect(),
        };
        let mut lattice_to_coords = Vec::with_capacity(top + 1);
        for (k, b) in lattice.iter().enumerate() {
            if *b == RatMatrix::identity(dims[k]) {
                lattice_to_coords.push(None);
            } else {
                let inv = b.transpose().inverse().map_err(|_| {
                    ModelError::Invalid(format!("integral lattice in degree {k} is degenerate"))
                })?;
                lattice_to_coords.push(Some(inv));
            }
        }
        Ok(Self { name: name.into(), top, labels, d, products, lattice, lattice_to_coords, commutative, origin })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn top_degree(&self) -> usize {
        self.top
    }

    pub fn dim(&self, k: usize) -> usize {
        self.labels.get(k).map_or(0, Vec::len)
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.top).map(|k| self.dim(k)).collect()
    }

    pub fn labels(&self, k: usize) -> &[String] {
        &self.labels[k]
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn lie_structure(&self) -> Option<&LieStructure> {
        match &self.origin {
            Origin::Lie(l) => Some(l),
            _ => None,
        }
    }

    pub fn differential(&self, k: usize) -> &RatMatrix {
        &self.d[k]
    }

    pub fn products(&self) -> &ProductTable {
        &self.products
    }

    pub fn lattice_basis(&self, k: usize) -> &RatMatrix {
        &self.lattice[k]
    }

    pub fn zero(&self, k: usize) -> Cochain {
        Cochain::new(k, vec![Rational::zero(); self.dim(k)])
    }

    pub fn basis_cochain(&self, k: usize, i: usize) -> Cochain {
        let mut c = self.zero(k);
        c.coeffs[i] = Rational::one();
        c
    }

    pub fn cochain(&self, k: usize, coeffs: Vec<Rational>) -> Result<Cochain, ModelError> {
        self.check_shape(&Cochain::new(k, coeffs.clone()))?;
        Ok(Cochain::new(k, coeffs))
    }

    pub fn check_shape(&self, c: &Cochain) -> Result<(), ModelError> {
        if c.coeffs.len() != self.dim(c.degree) {
            return Err(ModelError::CochainShape { degree: c.degree, expected: self.dim(c.degree), found: c.coeffs.len() });
        }
        Ok(())
    }

    /// The coboundary `d a`; lands in the zero space above the top degree.
    pub fn d(&self, a: &Cochain) -> Result<Cochain, ModelError> {
        self.check_shape(a)?;
        if a.degree > self.top {
            return Ok(Cochain::new(a.degree + 1, Vec::new()));
        }
        Ok(Cochain::new(a.degree + 1, self.d[a.degree].mul_vec(&a.coeffs)?))
    }

    /// Product through the structure tensors; degrees past the top give the
    /// zero cochain of the (zero-dimensional) target degree.
    pub fn wedge(&self, a: &Cochain, b: &Cochain) -> Result<Cochain, ModelError> {
        self.check_shape(a)?;
        self.check_shape(b)?;
        let deg = a.degree + b.degree;
        if deg > self.top {
            return Ok(Cochain::new(deg, Vec::new()));
        }
        let mut out = vec![Rational::zero(); self.dim(deg)];
        let Some(table) = self.products.get(&(a.degree, b.degree)) else {
            return Ok(Cochain::new(deg, out));
        };
        let dl = self.dim(b.degree);
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (idx, c) in &table[i * dl + j] {
                    out[*idx] += &xy * c;
                }
            }
        }
        Ok(Cochain::new(deg, out))
    }

    pub fn coboundary_space(&self, k: usize) -> Subspace {
        if k == 0 || k > self.top {
            return Subspace::zero(self.dim(k));
        }
        let m = &self.d[k - 1];
        let cols: Vec<Vec<Rational>> = (0..m.cols()).map(|j| m.column(j)).collect();
        Subspace::span(self.dim(k), &cols).expect("column length matches degree dimension")
    }

    pub fn cocycle_space(&self, k: usize) -> Subspace {
        if k > self.top {
            return Subspace::zero(0);
        }
        Subspace::span(self.dim(k), &self.d[k].kernel()).expect("kernel vectors have degree dimension")
    }

    /// One `x` with `d x = alpha`: the echelon back-substitution solution
    /// (free variables zero).
    pub fn solve_primitive(&self, alpha: &Cochain) -> Result<Cochain, ModelError> {
        self.check_shape(alpha)?;
        let k = alpha.degree;
        if k == 0 {
            if alpha.is_zero() {
                return Err(ModelError::Invalid("degree-0 cochains have no primitives".into()));
            }
            return Err(ModelError::NotExact { degree: 0, residual: alpha.coeff_strings() });
        }
        match self.d[k - 1].solve(&alpha.coeffs)? {
            Some(x) => Ok(Cochain::new(k - 1, x)),
            None => {
                let residual = self.coboundary_space(k).reduce(&alpha.coeffs)?;
                Err(ModelError::NotExact { degree: k, residual: residual.iter().map(format_rational).collect() })
            }
        }
    }

    /// Standard coordinates -> coordinates in the integral lattice basis.
    pub fn lattice_coords(&self, c: &Cochain) -> Result<Vec<Rational>, ModelError> {
        self.check_shape(c)?;
        Ok(match &self.lattice_to_coords[c.degree] {
            None => c.coeffs.clone(),
            Some(m) => m.mul_vec(&c.coeffs)?,
        })
    }

    pub fn from_lattice_coords(&self, k: usize, z: &[Rational]) -> Result<Cochain, ModelError> {
        Ok(Cochain::new(k, self.lattice[k].vec_mul(z)?))
    }

    pub fn is_integral(&self, c: &Cochain) -> Result<bool, ModelError> {
        Ok(self.lattice_coords(c)?.iter().all(|x| x.is_integer()))
    }

    /// Matrix of `d_k` in lattice coordinates, `None` when it is not integral.
    pub fn integral_differential(&self, k: usize) -> Option<IntMatrix> {
        if k >= self.top {
            return Some(IntMatrix::zeros(0, self.dim(k)));
        }
        let in_std = self.lattice[k].transpose();
        let m = self.d[k].mul(&in_std).ok()?;
        let m = match &self.lattice_to_coords[k + 1] {
            None => m,
            Some(to) => to.mul(&m).ok()?,
        };
        IntMatrix::from_rational(&m)
    }

    /// An integral `x` with `d x = alpha` for an integral exact `alpha`.
    pub fn solve_integral_primitive(&self, alpha: &Cochain) -> Result<Cochain, ModelError> {
        let k = alpha.degree;
        if k == 0 || k > self.top {
            return Err(ModelError::NoIntegralPrimitive { degree: k });
        }
        let z = self.lattice_coords(alpha)?;
        if !z.iter().all(|x| x.is_integer()) {
            return Err(ModelError::NoIntegralPrimitive { degree: k });
        }
        let z: Vec<_> = z.iter().map(|x| x.to_integer()).collect();
        let m = self
            .integral_differential(k - 1)
            .ok_or_else(|| ModelError::Validity(format!("d_{} does not preserve the integral lattice", k - 1)))?;
        let snf = smith_normal_form(&m);
        let x = snf.solve(&z)?.ok_or(ModelError::NoIntegralPrimitive { degree: k })?;
        let x: Vec<Rational> = x.into_iter().map(Rational::from_integer).collect();
        self.from_lattice_coords(k - 1, &x)
    }

    /// Exhaustive check of `d^2 = 0`, the graded Leibniz rule, associativity,
    /// graded commutativity (when declared) and lattice closure, in exact arithmetic.
    pub fn validate(&self) -> Result<ValidityReport, ModelError> {
        let mut failures = Vec::new();
        let mut checks = 0usize;

        let mut d_squared_zero = true;
        for k in 0..self.top.saturating_sub(1) {
            checks += 1;
            if !self.d[k + 1].mul(&self.d[k])?.is_zero() {
                d_squared_zero = false;
                failures.push(format!("d_{} d_{} != 0", k + 1, k));
            }
        }

        let mut leibniz = true;
        for k in 0..=self.top {
            for l in 0..=self.top - k {
                if k + l >= self.top {
                    continue;
                }
                let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
                for i in 0..self.dim(k) {
                    let a = self.basis_cochain(k, i);
                    let da = self.d(&a)?;
                    for j in 0..self.dim(l) {
                        checks += 1;
                        let b = self.basis_cochain(l, j);
                        let lhs = self.d(&self.wedge(&a, &b)?)?;
                        let mut rhs = self.wedge(&da, &b)?;
                        rhs.axpy(&sign, &self.wedge(&a, &self.d(&b)?)?);
                        if lhs != rhs {
                            leibniz = false;
                            failures.push(format!("Leibniz fails on ({}, {})", self.labels[k][i], self.labels[l][j]));
                        }
                    }
                }
            }
        }

        let mut associative = true;
        for k in 0..=self.top {
            for l in 0..=self.top - k {
                for m in 0..=self.top - k - l {
                    for i in 0..self.dim(k) {
                        let a = self.basis_cochain(k, i);
                        for j in 0..self.dim(l) {
                            let b = self.basis_cochain(l, j);
                            let ab = self.wedge(&a, &b)?;
                            for t in 0..self.dim(m) {
                                checks += 1;
                                let c = self.basis_cochain(m, t);
                                let left = self.wedge(&ab, &c)?;
                                let right = self.wedge(&a, &self.wedge(&b, &c)?)?;
                                if left != right {
                                    associative = false;
                                    failures.push(format!(
                                        "associativity fails on ({}, {}, {})",
                                        self.labels[k][i], self.labels[l][j], self.labels[m][t]
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }

        let graded_commutative = if self.commutative {
            let mut ok = true;
            for k in 0..=self.top {
                for l in 0..=self.top - k {
                    let sign = if (k * l) % 2 == 0 { Rational::one() } else { -Rational::one() };
                    for i in 0..self.dim(k) {
                        let a = self.basis_cochain(k, i);
                        for j in 0..self.dim(l) {
                            checks += 1;
                            let b = self.basis_cochain(l, j);
                            if self.wedge(&a, &b)? != self.wedge(&b, &a)?.scaled(&sign) {
                                ok = false;
                                failures.push(format!(
                                    "graded commutativity fails on ({}, {})",
                                    self.labels[k][i], self.labels[l][j]
                                ));
                            }
                        }
                    }
                }
            }
            Some(ok)
        } else {
            None
        };

        let mut lattice_closed = true;
        for k in 0..self.top {
            checks += 1;
            if self.integral_differential(k).is_none() {
                lattice_closed = false;
                failures.push(format!("d_{k} does not map the integral lattice into itself"));
            }
        }

        failures.truncate(20);
        Ok(ValidityReport { d_squared_zero, leibniz, associative, graded_commutative, lattice_closed, checks, failures })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    /// Truncated polynomial algebra Q[x]/(x^2), |x| = 2, zero differential.
    fn dual_numbers() -> CochainModel {
        let labels = vec![vec!["1".into()], vec![], vec!["x".into()]];
        let d = vec![RatMatrix::zeros(0, 1), RatMatrix::zeros(1, 0), RatMatrix::zeros(0, 1)];
        let mut products = ProductTable::new();
        products.insert((0, 0), vec![vec![(0, rat(1))]]);
        products.insert((0, 2), vec![vec![(0, rat(1))]]);
        products.insert((2, 0), vec![vec![(0, rat(1))]]);
        CochainModel::new("dual numbers", labels, d, products, None, true, Origin::Custom).unwrap()
    }

    #[test]
    fn custom_model_validates() {
        let m = dual_numbers();
        let r = m.validate().unwrap();
        assert!(r.is_valid(), "{r:?}");
        let x = m.basis_cochain(2, 0);
        // degree overflow lands in the zero space
        let xx = m.wedge(&x, &x).unwrap();
        assert_eq!(xx.degree, 4);
        assert!(xx.coeffs.is_empty());
    }

    #[test]
    fn shape_errors() {
        let m = dual_numbers();
        assert!(m.wedge(&Cochain::new(2, vec![]), &m.basis_cochain(0, 0)).is_err());
        let bad = CochainModel::new("bad", vec![vec!["1".into()]], vec![], ProductTable::new(), None, true, Origin::Custom);
        assert!(bad.is_err());
    }

    #[test]
    fn degree_zero_has_no_primitive() {
        let m = dual_numbers();
        assert!(matches!(m.solve_primitive(&m.basis_cochain(0, 0)), Err(ModelError::NotExact { .. })));
    }
}
