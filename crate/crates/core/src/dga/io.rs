//! Model files.
//!
//! ```json
//! { "type": "lie", "name": "heisenberg", "dim": 3, "c": [[1, 2, 3, "1"]],
//!   "metric": { "gram": [["1","0","0"],["0","1","0"],["0","0","1"]] },
//!   "covolume": "1", "pairing": { "2": [[1,0],[0,1]] } }
//! { "type": "simplicial", "simplices": [[0,1],[1,2],[0,2]] }
//! ```
//!
//! Lie indices are 1-based: `[i, j, k, v]` means `c^k_{ij} = v`. Rationals are
//! `"p/q"` strings or JSON integers. `"integral_lattice"` optionally maps a
//! degree to a matrix whose rows span the integral cochains of that degree.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::dga::lie::{build_chevalley_eilenberg, LieStructure};
use crate::dga::model::{CochainModel, Origin};
use crate::dga::simplicial::{build_simplicial_cochains, SimplicialComplex};
use crate::error::ModelError;
use crate::linalg::RatMatrix;
use crate::rational::{rat, value_to_rational, Rational};

/// A parsed model file: the cochain model plus optional geometric data.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub model: CochainModel,
    /// Gram matrix on the degree-1 frame (Lie models only).
    pub metric: Option<RatMatrix>,
    pub covolume: Rational,
    /// Declared unimodular pairing matrices between cohomology and homology, by degree.
    pub pairings: BTreeMap<usize, RatMatrix>,
}

impl ModelFile {
    pub fn from_model(model: CochainModel) -> Self {
        Self { model, metric: None, covolume: rat(1), pairings: BTreeMap::new() }
    }

    pub fn with_metric(mut self, gram: RatMatrix) -> Self {
        self.metric = Some(gram);
        self
    }
}

fn parse_err(msg: impl Into<String>) -> ModelError {
    ModelError::Parse(msg.into())
}

pub fn parse_matrix(v: &Value, what: &str) -> Result<RatMatrix, ModelError> {
    let rows = v.as_array().ok_or_else(|| parse_err(format!("{what}: expected an array of rows")))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or_else(|| parse_err(format!("{what}: expected an array of rows")))?;
        let parsed: Option<Vec<Rational>> = row.iter().map(value_to_rational).collect();
        out.push(parsed.ok_or_else(|| parse_err(format!("{what}: entries must be integers or \"p/q\" strings")))?);
    }
    if out.is_empty() {
        return Ok(RatMatrix::zeros(0, 0));
    }
    Ok(RatMatrix::from_rows(out)?)
}

fn parse_index(v: &Value, what: &str) -> Result<usize, ModelError> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| parse_err(format!("{what}: expected a nonnegative integer")))
}

fn degree_map(v: Option<&Value>, what: &str) -> Result<BTreeMap<usize, RatMatrix>, ModelError> {
    let mut out = BTreeMap::new();
    let Some(v) = v else { return Ok(out) };
    let obj = v.as_object().ok_or_else(|| parse_err(format!("{what}: expected an object keyed by degree")))?;
    for (k, m) in obj {
        let deg: usize = k.parse().map_err(|_| parse_err(format!("{what}: key {k:?} is not a degree")))?;
        out.insert(deg, parse_matrix(m, what)?);
    }
    Ok(out)
}

pub fn parse_model(v: &Value) -> Result<ModelFile, ModelError> {
    let kind = v.get("type").and_then(Value::as_str).ok_or_else(|| parse_err("missing \"type\""))?;
    let name = v.get("name").and_then(Value::as_str).unwrap_or(kind).to_string();
    let mut model = match kind {
        "lie" => {
            let dim = parse_index(v.get("dim").ok_or_else(|| parse_err("missing \"dim\""))?, "dim")?;
            let mut entries = Vec::new();
            for e in v.get("c").and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]) {
                let e = e.as_array().filter(|e| e.len() == 4).ok_or_else(|| parse_err("c: entries are [i, j, k, value]"))?;
                let idx = |x: &Value| -> Result<usize, ModelError> {
                    let i = parse_index(x, "c")?;
                    i.checked_sub(1).ok_or_else(|| parse_err("c: indices are 1-based"))
                };
                let val = value_to_rational(&e[3]).ok_or_else(|| parse_err("c: value must be an integer or \"p/q\""))?;
                entries.push((idx(&e[0])?, idx(&e[1])?, idx(&e[2])?, val));
            }
            let lie = LieStructure::from_entries(dim, &entries)?;
            build_chevalley_eilenberg(&lie, &name)?
        }
        "simplicial" => {
            let list = v.get("simplices").and_then(Value::as_array).ok_or_else(|| parse_err("missing \"simplices\""))?;
            let mut simplices = Vec::new();
            for s in list {
                let s = s.as_array().ok_or_else(|| parse_err("simplices: expected vertex lists"))?;
                simplices.push(s.iter().map(|x| parse_index(x, "simplices")).collect::<Result<Vec<_>, _>>()?);
            }
            build_simplicial_cochains(&SimplicialComplex::from_maximal(&simplices)?, &name)?
        }
        other => return Err(parse_err(format!("unknown model type {other:?}"))),
    };

    let lattice = degree_map(v.get("integral_lattice"), "integral_lattice")?;
    if !lattice.is_empty() {
        let full = (0..=model.top_degree())
            .map(|k| lattice.get(&k).cloned().unwrap_or_else(|| RatMatrix::identity(model.dim(k))))
            .collect();
        model = rebuild_with_lattice(&model, full)?;
    }

    let metric = match v.get("metric") {
        None | Some(Value::Null) => None,
        Some(m) => {
            let gram = m.get("gram").ok_or_else(|| parse_err("metric: missing \"gram\""))?;
            Some(parse_matrix(gram, "metric.gram")?)
        }
    };
    let covolume = match v.get("covolume") {
        None => rat(1),
        Some(c) => value_to_rational(c).ok_or_else(|| parse_err("covolume must be a rational"))?,
    };
    let pairings = degree_map(v.get("pairing"), "pairing")?;
    Ok(ModelFile { model, metric, covolume, pairings })
}

fn rebuild_with_lattice(m: &CochainModel, lattice: Vec<RatMatrix>) -> Result<CochainModel, ModelError> {
    let labels = (0..=m.top_degree()).map(|k| m.labels(k).to_vec()).collect();
    let d = (0..=m.top_degree()).map(|k| m.differential(k).clone()).collect();
    let origin: Origin = m.origin().clone();
    CochainModel::new(m.name(), labels, d, m.products().clone(), Some(lattice), m.is_commutative(), origin)
}

pub fn parse_model_str(s: &str) -> Result<ModelFile, ModelError> {
    let v: Value = serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))?;
    parse_model(&v)
}

pub fn load_model(path: &Path) -> Result<ModelFile, ModelError> {
    let s = std::fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
    parse_model_str(&s)
}
