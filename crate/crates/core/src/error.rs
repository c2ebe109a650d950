use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("ragged matrix: row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("Jacobi identity fails for generators ({i}, {j}, {k})")]
    Jacobi { i: usize, j: usize, k: usize },
    #[error("structure constants are not antisymmetric at ({i}, {j}, {k})")]
    NotAntisymmetric { i: usize, j: usize, k: usize },
    #[error("degree {degree} exceeds top degree {top}")]
    DegreeOutOfRange { degree: usize, top: usize },
    #[error("cochain has {found} coordinates, degree {degree} has dimension {expected}")]
    CochainShape { degree: usize, expected: usize, found: usize },
    #[error("cochain of degree {degree} is not exact; residual modulo coboundaries: {residual:?}")]
    NotExact { degree: usize, residual: Vec<String> },
    #[error("cochain of degree {degree} has no integral primitive")]
    NoIntegralPrimitive { degree: usize },
    #[error("validity check failed: {0}")]
    Validity(String),
    #[error("model file: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CohomologyError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("cochain of degree {degree} is not closed")]
    NotClosed { degree: usize },
    #[error("integral lattice is not preserved by d in degree {degree}")]
    LatticeNotClosed { degree: usize },
    #[error("pairing matrix for degree {degree} is not unimodular")]
    PairingNotUnimodular { degree: usize },
    #[error("class coordinates have length {found}, expected {expected}")]
    Shape { expected: usize, found: usize },
    #[error("class in degree {degree} is not integral")]
    NotIntegral { degree: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MasseyError {
    #[error("undefined Massey product: {which} cup product is nonzero ({coords:?})")]
    Undefined { which: &'static str, coords: Vec<String> },
    #[error("missing primitive for pair ({0}, {1}): cup product is not zero")]
    MissingPrimitive(usize, usize),
    #[error("pairing {value} is not an integer (non-integral primitive or torsion obstruction)")]
    NotIntegral { value: String },
    #[error("index {index} out of range for family of size {size}")]
    Index { index: usize, size: usize },
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("lattice basis is degenerate (rank {rank} < {dim})")]
    Degenerate { rank: usize, dim: usize },
    #[error("enumeration budget of {budget} points exceeded at radius {radius}")]
    BudgetExceeded { budget: usize, radius: f64 },
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("lattice file: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("metric is not positive definite (leading minor {index} is {value})")]
    NotPositiveDefinite { index: usize, value: String },
    #[error("metric has size {found}, model has {expected} generators")]
    MetricShape { expected: usize, found: usize },
    #[error("model has no degree-one frame (not a Chevalley-Eilenberg model)")]
    NotInvariantModel,
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("Massey-type insufficient for this x0: no quasiorthogonal Massey element pairs nontrivially with it")]
    NoPairingTriple,
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("awaiting model: {0}")]
    AwaitingModel(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Massey(#[from] MasseyError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
