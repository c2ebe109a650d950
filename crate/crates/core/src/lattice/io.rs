//! Lattice files.
//!
//! ```json
//! { "basis": [[1, 0], [0, 5]], "norm": { "kind": "quadratic", "gram": [[1, 0], [0, 1]] } }
//! ```
//!
//! Norm kinds: `euclidean`, `quadratic` (`gram`), `polyhedral` (`facets`, with
//! `||x|| = max |f . x|`, or `vertices` of the unit ball), `l1`, `linf`.

use std::path::Path;

use serde_json::Value;

use crate::dga::io::parse_matrix;
use crate::error::LatticeError;
use crate::lattice::minima::NormedLattice;
use crate::lattice::norm::NormOracle;

fn err(msg: impl Into<String>) -> LatticeError {
    LatticeError::Parse(msg.into())
}

pub fn parse_norm(v: &Value, dim: usize) -> Result<NormOracle, LatticeError> {
    let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| err("norm: missing \"kind\""))?;
    let matrix = |key: &str| -> Result<Vec<Vec<crate::rational::Rational>>, LatticeError> {
        let m = v.get(key).ok_or_else(|| err(format!("norm: missing \"{key}\"")))?;
        Ok(parse_matrix(m, key).map_err(|e| err(e.to_string()))?.to_rows())
    };
    let norm = match kind {
        "euclidean" => NormOracle::euclidean(dim),
        "l1" => NormOracle::l1(dim),
        "linf" => NormOracle::linf(dim),
        "quadratic" => {
            NormOracle::quadratic(crate::linalg::RatMatrix::from_rows(matrix("gram")?).map_err(|e| err(e.to_string()))?)?
        }
        "polyhedral" if v.get("facets").is_some() => NormOracle::polyhedral(matrix("facets")?)?,
        "polyhedral" => NormOracle::from_vertices(&matrix("vertices")?)?,
        other => return Err(err(format!("unknown norm kind {other:?}"))),
    };
    if norm.dim() != dim {
        return Err(err(format!("norm has dimension {}, basis has {dim} columns", norm.dim())));
    }
    Ok(norm)
}

pub fn parse_lattice(v: &Value) -> Result<NormedLattice, LatticeError> {
    let basis = parse_matrix(v.get("basis").ok_or_else(|| err("missing \"basis\""))?, "basis").map_err(|e| err(e.to_string()))?;
    let norm = match v.get("norm") {
        None => NormOracle::euclidean(basis.cols()),
        Some(n) => parse_norm(n, basis.cols())?,
    };
    NormedLattice::new(basis, norm)
}

pub fn parse_lattice_str(s: &str) -> Result<NormedLattice, LatticeError> {
    let v: Value = serde_json::from_str(s).map_err(|e| err(e.to_string()))?;
    parse_lattice(&v)
}

pub fn load_lattice(path: &Path) -> Result<NormedLattice, LatticeError> {
    let s = std::fs::read_to_string(path).map_err(|e| err(format!("{}: {e}", path.display())))?;
    parse_lattice_str(&s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_kinds() {
        let l = parse_lattice_str(r#"{"basis":[[1,0],[0,5]],"norm":{"kind":"quadratic","gram":[[1,0],[0,"1/4"]]}}"#).unwrap();
        assert_eq!(l.rank(), 2);
        let p = parse_lattice_str(r#"{"basis":[[1,0],[0,1]],"norm":{"kind":"polyhedral","vertices":[[1,0],[0,1]]}}"#).unwrap();
        assert_eq!(p.norm().kind_name(), "polyhedral");
        assert!(parse_lattice_str(r#"{"basis":[[1,0],[0,1]],"norm":{"kind":"mystery"}}"#).is_err());
        assert!(parse_lattice_str(r#"{"basis":[[1,2],[2,4]]}"#).is_err());
    }
}
