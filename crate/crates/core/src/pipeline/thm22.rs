use std::collections::BTreeMap;

use crate::cohomology::CohomologyRing;
use crate::error::PipelineError;
use crate::geometry::{isoperimetric_quotient, GeometryOptions, InvariantMetric, NormProfile};
use crate::massey::quasiorthogonal_massey_element;
use crate::pipeline::common::{binom, integral_pairing, primitives, quasi_family, Family, SystoleClass};
use crate::pipeline::hypotheses::check_thm22;
use crate::pipeline::report::{Bracket, ChainLine, TripleReport, VerificationReport};
use crate::pipeline::{metric_strings, monotone, Selector};
use crate::rational::rationals_to_strings;

/// Runs the proof chain of the triple-Massey systolic inequality in degree
/// `m` at one metric, checking every intermediate inequality numerically.
pub fn verify_chain_thm22(
    ring: &CohomologyRing,
    metric: &InvariantMetric,
    m: usize,
    opts: &GeometryOptions,
) -> Result<VerificationReport, PipelineError> {
    let hypotheses = check_thm22(ring, m)?;
    if !hypotheses.passed {
        return Err(PipelineError::Hypothesis(hypotheses.failures()));
    }
    let top = 3 * m - 1;
    let profile_top = NormProfile::new(ring, metric, top, opts)?;
    let x0 = SystoleClass::find(&profile_top, 1)?;
    let profile_m = NormProfile::new(ring, metric, m, opts)?;
    let family = Family::build(ring, &profile_m)?;
    let iq = isoperimetric_quotient(ring, metric, 2 * m, opts)?;
    let iqb = Bracket::with_estimate(&iq.value, iq.estimate);
    let prims = primitives(ring, metric, &family, iqb, opts)?;
    let quasi = quasi_family(ring, &family, &prims)?;

    let b = family.len();
    let mut chosen = None;
    'search: for s in 0..b {
        for t in 0..b {
            for r in 0..b {
                let q = quasiorthogonal_massey_element(ring, &quasi, s, t, r)?;
                let pairing = ring.pair_with_homology(&q.class, &x0.class)?;
                if !num_traits::Zero::is_zero(&pairing) {
                    chosen = Some((q, integral_pairing(&pairing)?));
                    break 'search;
                }
            }
        }
    }
    let (q, pairing) = chosen.ok_or(PipelineError::NoPairingTriple)?;
    let (s, t, r) = q.indices;

    let c1 = binom(3 * m - 1, m);
    let c2 = binom(2 * m, m);
    let nx0 = x0.norm;
    let lam = &family.norms;
    let q_comass = {
        let c = profile_top.comass(&q.cochain.coeffs);
        Bracket::with_estimate(&c.value, c.estimate)
    };
    let w_st = prims.comass[&(s, t)];
    let w_tr = prims.comass[&(t, r)];
    let vv_st = prims.wedge[&(s, t)];
    let vv_tr = prims.wedge[&(t, r)];
    let big_lambda = family.last();
    let stsys_m = SystoleClass::find(&profile_m, 1)?.norm;

    let r0 = Bracket::exact(pairing.unsigned_abs() as f64);
    let r1 = q_comass.mul(nx0);
    let r2 = w_st.mul(lam[r]).add(lam[s].mul(w_tr)).scale(c1).mul(nx0);
    let r3 = iqb.mul(vv_st.mul(lam[r]).add(lam[s].mul(vv_tr))).scale(c1).mul(nx0);
    let r4 = lam[s].mul(lam[t]).mul(lam[r]).mul(iqb).scale(2.0 * c1 * c2).mul(nx0);
    let r5 = big_lambda.powi(3).mul(iqb).scale(2.0 * c1 * c2).mul(nx0);
    let lhs = stsys_m.powi(3);
    let rhs = stsys_m.mul(big_lambda).powi(3).mul(iqb).scale(2.0 * c1 * c2).mul(nx0);
    let chain = vec![
        ChainLine::new("integrality", "1 <= |<q, x0>|", Bracket::exact(1.0), r0),
        ChainLine::new("duality", "|<q, x0>| <= |q|* |x0|", r0, r1),
        ChainLine::new("wedge", "|q|* |x0| <= C1 (|w_st|* |v_r|* + |v_s|* |w_tr|*) |x0|", r1, r2),
        ChainLine::new("primitive_bound", "... <= C1 IQ (|v_s v_t|* |v_r|* + |v_s|* |v_t v_r|*) |x0|", r2, r3),
        ChainLine::new("cup_wedge", "... <= 2 C1 C2 l_s l_t l_r IQ |x0|", r3, r4),
        ChainLine::new("last_minimum", "... <= 2 C1 C2 Lambda^3 IQ |x0|", r4, r5),
        ChainLine::new(
            "systolic",
            format!("stsys_{m}^3 <= 2 C1 C2 (lambda_1(H_{m}) Lambda(H^{m}))^3 IQ_{} stsys_{top}", 2 * m),
            lhs,
            rhs,
        ),
    ];
    let bn = b as f64 * (1.0 + (b as f64).ln());
    let implied = lhs.div(iqb.mul(nx0).scale(bn.powi(3)));
    let mut constants = BTreeMap::new();
    constants.insert("C1_wedge".to_string(), c1);
    constants.insert("C2_cup".to_string(), c2);
    constants.insert("b".to_string(), b as f64);
    constants.insert("b_1_plus_log_b".to_string(), bn);
    let mut quantities = BTreeMap::new();
    quantities.insert(format!("stsys_{m}"), stsys_m);
    quantities.insert(format!("stsys_{top}"), nx0);
    quantities.insert(format!("IQ_{}", 2 * m), iqb);
    quantities.insert(format!("Lambda_H^{m}"), big_lambda);
    quantities.insert(format!("lambda1_H_{m}_times_Lambda_H^{m}"), stsys_m.mul(big_lambda));
    quantities.insert("comass_q".to_string(), q_comass);
    let dimensionless_margin = Some(chain.last().expect("nonempty").relative_margin);
    let mono = monotone(&[r0, r1, r2, r3, r4, r5], opts.tol);
    Ok(VerificationReport {
        selector: Selector::Thm22.name().into(),
        model: ring.model().name().into(),
        m,
        metric: metric_strings(metric),
        hypotheses,
        x0: Some(x0.report()),
        branch: None,
        families: vec![family.report()],
        iq: Some(iq.report()),
        primitives: prims.reports,
        triple: Some(TripleReport {
            indices: (s + 1, t + 1, r + 1),
            partner: None,
            cochain: rationals_to_strings(&q.cochain.coeffs),
            class: rationals_to_strings(&q.class.coords),
            pairing,
        }),
        constants,
        quantities,
        chain,
        implied_constant: Some(implied),
        dimensionless_margin,
        monotone: mono,
        certified: false,
        passed: false,
    }
    .finish())
}
