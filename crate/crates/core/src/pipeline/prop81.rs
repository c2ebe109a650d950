use std::collections::BTreeMap;

use crate::cohomology::CohomologyRing;
use crate::error::PipelineError;
use crate::geometry::{comass_with, isoperimetric_quotient, ComassEvaluator, GeometryOptions, InvariantMetric, NormProfile};
use crate::massey::quasiorthogonal_massey_element;
use crate::pipeline::common::{binom, integral_pairing, primitives, quasi_family, Family, SystoleClass};
use crate::pipeline::hypotheses::check_prop81;
use crate::pipeline::report::{Bracket, ChainLine, TripleReport, VerificationReport};
use crate::pipeline::{metric_strings, monotone, Selector};
use crate::rational::rationals_to_strings;

/// Dimension 8: the shortest class of `H_8` pairs with a product `u v`
/// (`u` a Massey element over `H^2`, `v` in `H^3`) or with a product of two
/// classes of `H^4`. Branches are tried in that order.
pub fn verify_prop81(ring: &CohomologyRing, metric: &InvariantMetric, opts: &GeometryOptions) -> Result<VerificationReport, PipelineError> {
    let hypotheses = check_prop81(ring)?;
    if !hypotheses.passed {
        return Err(PipelineError::Hypothesis(hypotheses.failures()));
    }
    let model = ring.model();
    let profile8 = NormProfile::new(ring, metric, 8, opts)?;
    let x0 = SystoleClass::find(&profile8, 1)?;
    let nx0 = x0.norm;
    let ev8 = ComassEvaluator::new(metric, 8, opts);
    let top_comass = |c: &crate::dga::Cochain| {
        let v = comass_with(&ev8, &c.coeffs, opts.tol);
        Bracket::with_estimate(&v.value, v.estimate)
    };
    let mut constants = BTreeMap::new();
    let mut quantities = BTreeMap::new();
    quantities.insert("stsys_8".to_string(), nx0);

    // Massey branch
    let profile2 = NormProfile::new(ring, metric, 2, opts)?;
    let profile3 = NormProfile::new(ring, metric, 3, opts)?;
    let f2 = Family::build(ring, &profile2)?;
    let iq = isoperimetric_quotient(ring, metric, 4, opts)?;
    let iqb = Bracket::with_estimate(&iq.value, iq.estimate);
    let prims = primitives(ring, metric, &f2, iqb, opts)?;
    let quasi = quasi_family(ring, &f2, &prims)?;
    let f3 = if ring.betti(3) > 0 { Some(Family::build(ring, &profile3)?) } else { None };
    let mut massey = None;
    if let Some(f3) = &f3 {
        let b = f2.len();
        'search: for s in 0..b {
            for t in 0..b {
                for r in 0..b {
                    let q = quasiorthogonal_massey_element(ring, &quasi, s, t, r)?;
                    if q.class.is_zero() {
                        continue;
                    }
                    for j in 0..f3.len() {
                        let top = ring.cup(&q.class, &f3.classes[j])?;
                        let pairing = ring.pair_with_homology(&top, &x0.class)?;
                        if !num_traits::Zero::is_zero(&pairing) {
                            massey = Some((q, j, integral_pairing(&pairing)?));
                            break 'search;
                        }
                    }
                }
            }
        }
    }
    let stsys2 = SystoleClass::find(&profile2, 1)?.norm;
    quantities.insert("stsys_2".to_string(), stsys2);
    quantities.insert("IQ_4".to_string(), iqb);

    let (branch, chain, triple, families, mono, first_term) = if let (Some((q, j, pairing)), Some(f3)) = (massey, &f3) {
        let (s, t, r) = q.indices;
        let lam = &f2.norms;
        let mu = f3.norms[j];
        let stsys3 = SystoleClass::find(&profile3, 1)?.norm;
        quantities.insert("stsys_3".to_string(), stsys3);
        let qv = model.wedge(&q.cochain, &f3.forms[j])?;
        let q_comass = {
            let c = NormProfile::new(ring, metric, 5, opts)?.comass(&q.cochain.coeffs);
            Bracket::with_estimate(&c.value, c.estimate)
        };
        let (c_p, c_q, c_2) = (binom(8, 3), binom(5, 2), binom(4, 2));
        let k = 2.0 * c_p * c_q * c_2;
        constants.insert("K_massey".to_string(), k);
        let r0 = Bracket::exact(pairing.unsigned_abs() as f64);
        let r1 = top_comass(&qv).mul(nx0);
        let r2 = q_comass.mul(mu).scale(c_p).mul(nx0);
        let r3 = prims.comass[&(s, t)].mul(lam[r]).add(lam[s].mul(prims.comass[&(t, r)])).mul(mu).scale(c_p * c_q).mul(nx0);
        let r4 = iqb
            .mul(prims.wedge[&(s, t)].mul(lam[r]).add(lam[s].mul(prims.wedge[&(t, r)])))
            .mul(mu)
            .scale(c_p * c_q)
            .mul(nx0);
        let r5 = lam[s].mul(lam[t]).mul(lam[r]).mul(mu).mul(iqb).scale(k).mul(nx0);
        let r6 = f2.last().powi(3).mul(f3.last()).mul(iqb).scale(k).mul(nx0);
        // stsys_2^3 stsys_3 / IQ_4 <= K (l1(H_2) Lambda(H^2))^3 (l1(H_3) Lambda(H^3)) stsys_8
        let lhs = stsys2.powi(3).mul(stsys3).div(iqb);
        let rhs = stsys2.mul(f2.last()).powi(3).mul(stsys3.mul(f3.last())).scale(k).mul(nx0);
        let chain = vec![
            ChainLine::new("integrality", "1 <= |<q v, x0>|", Bracket::exact(1.0), r0),
            ChainLine::new("duality", "|<q v, x0>| <= |q v|* |x0|", r0, r1),
            ChainLine::new("wedge_partner", "... <= C(8,3) |q|* mu_j |x0|", r1, r2),
            ChainLine::new("wedge", "... <= C(8,3) C(5,2) (|w_st|* l_r + l_s |w_tr|*) mu_j |x0|", r2, r3),
            ChainLine::new("primitive_bound", "... <= C(8,3) C(5,2) IQ_4 (|v_s v_t|* l_r + l_s |v_t v_r|*) mu_j |x0|", r3, r4),
            ChainLine::new("cup_wedge", "... <= K l_s l_t l_r mu_j IQ_4 |x0|", r4, r5),
            ChainLine::new("last_minimum", "... <= K Lambda(H^2)^3 Lambda(H^3) IQ_4 |x0|", r5, r6),
            ChainLine::new("systolic", "stsys_2^3 stsys_3 / IQ_4 <= K (l1 Lambda)_2^3 (l1 Lambda)_3 stsys_8", lhs, rhs),
        ];
        let triple = TripleReport {
            indices: (s + 1, t + 1, r + 1),
            partner: Some(j + 1),
            cochain: rationals_to_strings(&q.cochain.coeffs),
            class: rationals_to_strings(&q.class.coords),
            pairing,
        };
        let mono = monotone(&[r0, r1, r2, r3, r4, r5, r6], opts.tol);
        ("massey", chain, Some(triple), vec![f2.report(), f3.report()], mono, Some(lhs))
    } else {
        // cup-square branch: some product of two family members in H^4 pairs with x0
        let profile4 = NormProfile::new(ring, metric, 4, opts)?;
        let f4 = Family::build(ring, &profile4)?;
        let mut hit = None;
        'pairs: for i in 0..f4.len() {
            for j in i..f4.len() {
                let top = ring.cup(&f4.classes[i], &f4.classes[j])?;
                let pairing = ring.pair_with_homology(&top, &x0.class)?;
                if !num_traits::Zero::is_zero(&pairing) {
                    hit = Some((i, j, integral_pairing(&pairing)?));
                    break 'pairs;
                }
            }
        }
        let (i, j, pairing) = hit.ok_or_else(|| {
            PipelineError::Hypothesis("x0 pairs trivially with every Massey product and every product in H^4".into())
        })?;
        let c = binom(8, 4);
        constants.insert("K_square".to_string(), c);
        let stsys4 = SystoleClass::find(&profile4, 1)?.norm;
        quantities.insert("stsys_4".to_string(), stsys4);
        let vv = model.wedge(&f4.forms[i], &f4.forms[j])?;
        let r0 = Bracket::exact(pairing.unsigned_abs() as f64);
        let r1 = top_comass(&vv).mul(nx0);
        let r2 = f4.norms[i].mul(f4.norms[j]).scale(c).mul(nx0);
        let r3 = f4.last().powi(2).scale(c).mul(nx0);
        let lhs = stsys4.powi(2);
        let rhs = stsys4.mul(f4.last()).powi(2).scale(c).mul(nx0);
        let chain = vec![
            ChainLine::new("integrality", "1 <= |<v_i v_j, x0>|", Bracket::exact(1.0), r0),
            ChainLine::new("duality", "|<v_i v_j, x0>| <= |v_i v_j|* |x0|", r0, r1),
            ChainLine::new("wedge", "... <= C(8,4) l_i l_j |x0|", r1, r2),
            ChainLine::new("last_minimum", "... <= C(8,4) Lambda(H^4)^2 |x0|", r2, r3),
            ChainLine::new("systolic", "stsys_4^2 <= C(8,4) (l1(H_4) Lambda(H^4))^2 stsys_8", lhs, rhs),
        ];
        let triple = TripleReport {
            indices: (i + 1, j + 1, 0),
            partner: None,
            cochain: rationals_to_strings(&vv.coeffs),
            class: rationals_to_strings(&ring.cup(&f4.classes[i], &f4.classes[j])?.coords),
            pairing,
        };
        let mono = monotone(&[r0, r1, r2, r3], opts.tol);
        ("cup_square", chain, Some(triple), vec![f2.report(), f4.report()], mono, None)
    };
    // min{stsys_2^3 stsys_3 / IQ_4, stsys_4^2} / stsys_8
    let second = if ring.betti(4) > 0 {
        let s4 = SystoleClass::find(&NormProfile::new(ring, metric, 4, opts)?, 1)?.norm;
        Some(s4.powi(2))
    } else {
        None
    };
    let first = match first_term {
        Some(f) => Some(f),
        None if ring.betti(3) > 0 && iqb.value > 0.0 => {
            let s3 = SystoleClass::find(&profile3, 1)?.norm;
            Some(stsys2.powi(3).mul(s3).div(iqb))
        }
        None => None,
    };
    let least = match (first, second) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let implied = least.map(|l| l.div(nx0));
    Ok(VerificationReport {
        selector: Selector::Prop81.name().into(),
        model: model.name().into(),
        m: 2,
        metric: metric_strings(metric),
        hypotheses,
        x0: Some(x0.report()),
        branch: Some(branch.into()),
        families,
        iq: Some(iq.report()),
        primitives: if branch == "massey" { prims.reports } else { Vec::new() },
        triple,
        constants,
        quantities,
        dimensionless_margin: Some(chain.last().expect("nonempty").relative_margin),
        chain,
        implied_constant: implied,
        monotone: mono,
        certified: false,
        passed: false,
    }
    .finish())
}
