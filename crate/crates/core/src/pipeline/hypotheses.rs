//! Hypothesis checks for each selector. Every verdict carries its witness
//! data in `detail`.

use crate::cohomology::CohomologyRing;
use crate::error::PipelineError;
use crate::massey::{
    all_triples, massey_spanning_check, quasiorthogonal_massey_element, PrimitiveChoice, QuasiFamily,
};
use crate::linalg::Subspace;
use crate::pipeline::report::{check, HypothesisCheck, HypothesisReport};
use crate::pipeline::Selector;

fn torsion_free(ring: &CohomologyRing, k: usize) -> HypothesisCheck {
    let holds = k > ring.top_degree() || ring.torsion_free(k);
    let detail = match ring.torsion(k) {
        Some(t) if !t.is_empty() => format!("H^{k}(Z) torsion {:?}", t.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        None if k <= ring.top_degree() => format!("H^{k}(Z) unavailable (no integral lattice)"),
        _ => format!("H^{k}(Z) torsion-free"),
    };
    check("torsion_free", holds, detail)
}

fn cup_zero(ring: &CohomologyRing, m: usize) -> HypothesisCheck {
    let nonzero = ring.nonzero_cups(m, m);
    let detail = match nonzero.first() {
        None => format!("cup product H^{m} x H^{m} -> H^{} vanishes", 2 * m),
        Some((i, j, _)) => format!("{} nonzero products, first v{} v{}", nonzero.len(), i + 1, j + 1),
    };
    check("cup_zero", nonzero.is_empty(), detail)
}

fn top_degree(ring: &CohomologyRing, n: usize) -> HypothesisCheck {
    let top = ring.top_degree();
    let holds = top == n && ring.betti(n) == 1;
    check("dimension", holds, format!("top degree {top}, b_{top} = {}", ring.betti(top)))
}

/// Some triple of basis classes of `H^2` has a nontrivial Massey product.
fn nontrivial_massey_h2(ring: &CohomologyRing) -> Result<HypothesisCheck, PipelineError> {
    let triples = all_triples(ring, 2)?;
    let hit = triples.iter().find(|t| t.nontrivial == Some(true));
    Ok(match hit {
        Some(t) => check(
            "massey_nontrivial",
            true,
            format!("<v{}, v{}, v{}> is nontrivial", t.indices.0 + 1, t.indices.1 + 1, t.indices.2 + 1),
        ),
        None => check("massey_nontrivial", false, "every defined triple on H^2 contains zero"),
    })
}

pub fn check_thm22(ring: &CohomologyRing, m: usize) -> Result<HypothesisReport, PipelineError> {
    if m == 0 || 3 * m - 1 > ring.top_degree() {
        return Err(PipelineError::Scenario(format!("degree m = {m} needs top degree at least {}", 3 * m.max(1) - 1)));
    }
    let b = ring.betti(m);
    let mut checks = vec![check("betti_positive", b > 0, format!("b_{m} = {b}")), cup_zero(ring, m)];
    let span = if b > 0 && checks[1].holds {
        let s = massey_spanning_check(ring, m)?;
        check(
            "massey_type",
            s.sufficient,
            format!("quasiorthogonal Massey elements span {} of {} dimensions of H^{}", s.spanned_dim, s.target_dim, 3 * m - 1),
        )
    } else {
        check("massey_type", false, "Massey products over H^m are not all defined")
    };
    checks.push(span);
    checks.push(torsion_free(ring, 2 * m));
    Ok(HypothesisReport::new(Selector::Thm22.name(), m, checks))
}

pub fn check_thm222(ring: &CohomologyRing) -> Result<HypothesisReport, PipelineError> {
    let mut checks = vec![top_degree(ring, 7), cup_zero(ring, 2)];
    checks.push(if checks[1].holds {
        nontrivial_massey_h2(ring)?
    } else {
        check("massey_nontrivial", false, "Massey products over H^2 are not all defined")
    });
    checks.push(torsion_free(ring, 4));
    Ok(HypothesisReport::new(Selector::Thm222.name(), 2, checks))
}

/// `H^8` is spanned by products `u v` (`u` a nontrivial quasiorthogonal
/// Massey element over `H^2`, `v` in `H^3`) and squares of classes in `H^4`.
fn degree_eight_spanning(ring: &CohomologyRing) -> Result<HypothesisCheck, PipelineError> {
    let target = ring.betti(8);
    let mut vecs = Vec::new();
    let mut massey = 0;
    if ring.betti(2) > 0 && ring.cup_is_zero_on_degree(2) {
        let family = QuasiFamily::integral_basis(ring, 2, PrimitiveChoice::Echelon)?;
        let b = family.len();
        for s in 0..b {
            for t in 0..b {
                for r in 0..b {
                    let q = quasiorthogonal_massey_element(ring, &family, s, t, r)?;
                    if q.class.is_zero() {
                        continue;
                    }
                    massey += 1;
                    for v in ring.basis(3) {
                        vecs.push(ring.cup(&q.class, &v)?.coords);
                    }
                }
            }
        }
    }
    let b4 = ring.betti(4);
    let mut squares = 0;
    for i in 0..b4 {
        for j in i..b4 {
            let a = ring.basis_class(4, i);
            let a = if i == j { a } else { ring.class(4, a.coords.iter().zip(&ring.basis_class(4, j).coords).map(|(x, y)| x + y).collect())? };
            let w = ring.cup(&a, &a)?;
            if !w.is_zero() {
                squares += 1;
            }
            vecs.push(w.coords);
        }
    }
    let span = Subspace::span(target, &vecs).map_err(crate::error::ModelError::from)?;
    Ok(check(
        "degree_eight_spanned",
        target > 0 && span.dim() == target,
        format!("{} of {target} dimensions from {massey} Massey elements and {squares} nonzero squares", span.dim()),
    ))
}

pub fn check_prop81(ring: &CohomologyRing) -> Result<HypothesisReport, PipelineError> {
    let top = ring.top_degree();
    let dim = check("dimension", top >= 8 && ring.betti(8) > 0, format!("top degree {top}, b_8 = {}", ring.betti(8)));
    let mut checks = vec![dim, cup_zero(ring, 2)];
    checks.push(if checks[1].holds {
        nontrivial_massey_h2(ring)?
    } else {
        check("massey_nontrivial", false, "Massey products over H^2 are not all defined")
    });
    checks.push(if checks[0].holds { degree_eight_spanning(ring)? } else { check("degree_eight_spanned", false, "no degree 8") });
    checks.push(torsion_free(ring, 4));
    Ok(HypothesisReport::new(Selector::Prop81.name(), 2, checks))
}

pub fn check_banaszczyk(ring: &CohomologyRing, m: usize) -> Result<HypothesisReport, PipelineError> {
    if m > ring.top_degree() {
        return Err(PipelineError::Scenario(format!("degree {m} exceeds the top degree {}", ring.top_degree())));
    }
    let b = ring.betti(m);
    Ok(HypothesisReport::new(
        Selector::BanaszczykOnly.name(),
        m,
        vec![check("betti_positive", b > 0, format!("b_{m} = {b}")), torsion_free(ring, m)],
    ))
}

pub fn check_hypotheses(selector: Selector, ring: &CohomologyRing, m: usize) -> Result<HypothesisReport, PipelineError> {
    match selector {
        Selector::Thm22 => check_thm22(ring, m),
        Selector::Thm222 => check_thm222(ring),
        Selector::Prop81 => check_prop81(ring),
        Selector::BanaszczykOnly => check_banaszczyk(ring, m),
    }
}
