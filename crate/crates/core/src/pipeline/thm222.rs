use std::collections::BTreeMap;

use crate::cohomology::CohomologyRing;
use crate::error::PipelineError;
use crate::geometry::{isoperimetric_quotient, volume, GeometryOptions, InvariantMetric, NormProfile};
use crate::massey::quasiorthogonal_massey_element;
use crate::pipeline::common::{binom, integral_pairing, primitives, quasi_family, Family, SystoleClass};
use crate::pipeline::hypotheses::check_thm222;
use crate::pipeline::report::{Bracket, ChainLine, TripleReport, VerificationReport};
use crate::pipeline::{metric_strings, monotone, Selector};
use crate::rational::{rationals_to_strings, Rational};

/// Volume version in dimension 7: the fundamental class is reached by a
/// quasiorthogonal Massey element over `H^2` times one more family member.
pub fn verify_chain_thm222(
    ring: &CohomologyRing,
    metric: &InvariantMetric,
    covolume: &Rational,
    opts: &GeometryOptions,
) -> Result<VerificationReport, PipelineError> {
    let hypotheses = check_thm222(ring)?;
    if !hypotheses.passed {
        return Err(PipelineError::Hypothesis(hypotheses.failures()));
    }
    let profile_top = NormProfile::new(ring, metric, 7, opts)?;
    let x0 = SystoleClass::find(&profile_top, 1)?;
    let profile2 = NormProfile::new(ring, metric, 2, opts)?;
    let family = Family::build(ring, &profile2)?;
    let iq = isoperimetric_quotient(ring, metric, 4, opts)?;
    let iqb = Bracket::with_estimate(&iq.value, iq.estimate);
    let prims = primitives(ring, metric, &family, iqb, opts)?;
    let quasi = quasi_family(ring, &family, &prims)?;
    let model = ring.model();

    let b = family.len();
    let mut chosen = None;
    'search: for s in 0..b {
        for t in 0..b {
            for r in 0..b {
                let q = quasiorthogonal_massey_element(ring, &quasi, s, t, r)?;
                if q.class.is_zero() {
                    continue;
                }
                for p in 0..b {
                    let top = ring.cup(&q.class, &family.classes[p])?;
                    let pairing = ring.pair_with_homology(&top, &x0.class)?;
                    if !num_traits::Zero::is_zero(&pairing) {
                        chosen = Some((q, p, integral_pairing(&pairing)?));
                        break 'search;
                    }
                }
            }
        }
    }
    let (q, p, pairing) = chosen.ok_or(PipelineError::NoPairingTriple)?;
    let (s, t, r) = q.indices;
    let qp = model.wedge(&q.cochain, &family.forms[p])?;
    let qp_comass = {
        let c = profile_top.comass(&qp.coeffs);
        Bracket::with_estimate(&c.value, c.estimate)
    };
    let q_comass = {
        let c = NormProfile::new(ring, metric, 5, opts)?.comass(&q.cochain.coeffs);
        Bracket::with_estimate(&c.value, c.estimate)
    };
    let vol = Bracket::from_norm(&volume(metric, covolume));
    let lam = &family.norms;
    let big_lambda = family.last();
    let stsys2 = SystoleClass::find(&profile2, 1)?.norm;
    let (c_p, c_q, c_2) = (binom(7, 2), binom(5, 2), binom(4, 2));
    let k = 2.0 * c_p * c_q * c_2;

    let r0 = Bracket::exact(pairing.unsigned_abs() as f64);
    let r1 = qp_comass.mul(x0.norm);
    let r1v = qp_comass.mul(vol);
    let r2 = q_comass.mul(lam[p]).scale(c_p).mul(vol);
    let r3 = prims.comass[&(s, t)].mul(lam[r]).add(lam[s].mul(prims.comass[&(t, r)])).mul(lam[p]).scale(c_p * c_q).mul(vol);
    let r4 = iqb
        .mul(prims.wedge[&(s, t)].mul(lam[r]).add(lam[s].mul(prims.wedge[&(t, r)])))
        .mul(lam[p])
        .scale(c_p * c_q)
        .mul(vol);
    let r5 = lam[s].mul(lam[t]).mul(lam[r]).mul(lam[p]).mul(iqb).scale(k).mul(vol);
    let r6 = big_lambda.powi(4).mul(iqb).scale(k).mul(vol);
    let lhs = stsys2.powi(4);
    let rhs = stsys2.mul(big_lambda).powi(4).mul(iqb).scale(k).mul(vol);
    let chain = vec![
        ChainLine::new("integrality", "1 <= |<q v_p, [X]>|", Bracket::exact(1.0), r0),
        ChainLine::new("duality", "|<q v_p, [X]>| <= |q v_p|* |[X]|", r0, r1),
        ChainLine::new("volume", "|q v_p|* |[X]| <= |q v_p|* vol_7", r1, r1v),
        ChainLine::new("wedge_partner", "... <= C(7,2) |q|* l_p vol_7", r1v, r2),
        ChainLine::new("wedge", "... <= C(7,2) C(5,2) (|w_st|* l_r + l_s |w_tr|*) l_p vol_7", r2, r3),
        ChainLine::new("primitive_bound", "... <= C(7,2) C(5,2) IQ_4 (|v_s v_t|* l_r + l_s |v_t v_r|*) l_p vol_7", r3, r4),
        ChainLine::new("cup_wedge", "... <= 2 C(7,2) C(5,2) C(4,2) l_s l_t l_r l_p IQ_4 vol_7", r4, r5),
        ChainLine::new("last_minimum", "... <= 2 C(7,2) C(5,2) C(4,2) Lambda^4 IQ_4 vol_7", r5, r6),
        ChainLine::new("systolic", "stsys_2^4 <= K (lambda_1(H_2) Lambda(H^2))^4 IQ_4 vol_7", lhs, rhs),
    ];
    let implied = lhs.div(iqb.mul(vol));
    let mut constants = BTreeMap::new();
    constants.insert("K".to_string(), k);
    constants.insert("b2".to_string(), b as f64);
    let mut quantities = BTreeMap::new();
    quantities.insert("stsys_2".to_string(), stsys2);
    quantities.insert("stsys_7".to_string(), x0.norm);
    quantities.insert("vol_7".to_string(), vol);
    quantities.insert("IQ_4".to_string(), iqb);
    quantities.insert("Lambda_H^2".to_string(), big_lambda);
    let mono = monotone(&[r0, r1, r1v, r2, r3, r4, r5, r6], opts.tol);
    Ok(VerificationReport {
        selector: Selector::Thm222.name().into(),
        model: model.name().into(),
        m: 2,
        metric: metric_strings(metric),
        hypotheses,
        x0: Some(x0.report()),
        branch: None,
        families: vec![family.report()],
        iq: Some(iq.report()),
        primitives: prims.reports,
        triple: Some(TripleReport {
            indices: (s + 1, t + 1, r + 1),
            partner: Some(p + 1),
            cochain: rationals_to_strings(&q.cochain.coeffs),
            class: rationals_to_strings(&q.class.coords),
            pairing,
        }),
        constants,
        quantities,
        dimensionless_margin: Some(chain.last().expect("nonempty").relative_margin),
        chain,
        implied_constant: Some(implied),
        monotone: mono,
        certified: false,
        passed: false,
    }
    .finish())
}
