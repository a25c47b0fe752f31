//! Instability certificates: `∃c ∃z ∀x (V ≤ 0 ⇒ V̇ ≤ 0) ∧ V(z) < V(0)`.
//!
//! A trajectory from `z` keeps `V <= V(z) < V(0)`, so it never reaches the
//! origin. The reduction rules only express necessary conditions for global
//! `V̇ <= 0`, which this certificate does not need; applying them here is a
//! heuristic that shrinks the query.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::complete::{assignment_from, pad, param_names, pending_side};
use super::{prepare, secs, state_names, CertificateReport, Method, Preparation, Status, SynthError, SynthesisConfig};
use crate::poly::{MultiIndex, Polynomial, VectorField};
use crate::smt::{emit, model_spot_check, run_solver, Formula, QuantifiedFormula, Rel, SolverOutcome};
use crate::template::{Parity, TemplateSpec};
use crate::verify::{Verdict, Verifier};

/// Knobs specific to the instability search.
#[derive(Clone, Debug, PartialEq)]
pub struct InstabilityOptions {
    /// Random points at which the implication is spot-checked after a SAT answer.
    pub spot_checks: usize,
    /// Assert the leftover reduction inequalities as well.
    pub assert_pending: bool,
}

impl Default for InstabilityOptions {
    fn default() -> Self {
        InstabilityOptions { spot_checks: 10_000, assert_pending: false }
    }
}

impl InstabilityOptions {
    /// Template used by the random-system experiments: every monomial of
    /// degree 1 and 2, so that `{V <= 0}` need not be symmetric.
    pub fn default_template(nvars: usize) -> TemplateSpec {
        TemplateSpec { nvars, min_degree: 1, max_degree: 2, parity: Parity::All, cross_terms: true }
    }
}

/// Moves the state block of a `(params, x)` polynomial to `offset` in a
/// `total`-variable ring, keeping the parameters in front.
fn relocate_state(p: &Polynomial, k: usize, offset: usize, total: usize) -> Polynomial {
    let terms = p.terms().map(|(m, c)| {
        let e = m.exponents();
        let mut out = vec![0u32; total];
        out[..k].copy_from_slice(&e[..k]);
        out[offset..offset + (e.len() - k)].copy_from_slice(&e[k..]);
        (MultiIndex::new(out), c.clone())
    });
    Polynomial::from_terms(total, terms.collect::<Vec<_>>())
}

pub fn synth_instability(
    f: &VectorField,
    spec: &TemplateSpec,
    config: &SynthesisConfig,
    options: &InstabilityOptions,
    verifier: &Verifier,
) -> Result<CertificateReport, SynthError> {
    config.validate()?;
    let solver = verifier.solver.clone().ok_or(SynthError::SolverRequired(Method::Complete))?;
    let mut report = CertificateReport::new(&Method::Complete.to_string(), "instability");
    let prep = match prepare(f, spec, config.reduction(), &mut report)? {
        Preparation::Ready(p) => p,
        Preparation::Infeasible(why) => {
            // the rules are only heuristic here, so this proves nothing
            report.status = Status::Unknown;
            report.diagnostics.push(why);
            return Ok(report);
        }
    };

    let solve_start = Instant::now();
    let k = prep.params.len();
    let n = f.nvars();
    let total = k + 2 * n;
    let v_joint = prep.template.to_joint_polynomial(&prep.params);
    let vdot_joint = prep.lie.to_joint_polynomial(&prep.params);
    let v_x = relocate_state(&v_joint, k, k + n, total);
    let vdot_x = relocate_state(&vdot_joint, k, k + n, total);
    let v_z = pad(&v_joint, total);
    // templates have no constant term, so V(0) = 0
    let mut side = vec![Formula::atom(v_z, Rel::Lt)];
    if options.assert_pending {
        side.extend(pending_side(&prep, total));
    }
    let mut constants = param_names(&prep.params);
    constants.extend((1..=n).map(|i| format!("z{i}")));
    let query = QuantifiedFormula {
        constants,
        universals: state_names(n),
        side,
        matrix: Formula::implies(Formula::atom(v_x, Rel::Le), Formula::atom(vdot_x, Rel::Le)),
    };
    let outcome = run_solver(&solver, &emit(&query), config.timeout, &query.constants)?;
    report.timings.solve_s = secs(solve_start);
    report.cegis_iterations = 1;
    let model = match outcome {
        SolverOutcome::Sat(m) => m,
        SolverOutcome::Unsat => {
            report.status = Status::TemplateInfeasible;
            report.diagnostics.push("no instability certificate of this template shape".into());
            return Ok(report);
        }
        SolverOutcome::Timeout => {
            report.status = Status::Timeout;
            return Ok(report);
        }
        SolverOutcome::Unknown(why) => {
            report.status = Status::Unknown;
            report.diagnostics.push(why);
            return Ok(report);
        }
    };

    let verify_start = Instant::now();
    let values = query.model_values(&model).expect("model covers every constant");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    if !model_spot_check(&query, &model, options.spot_checks, &mut rng) {
        report.diagnostics.push("solver model failed the random spot check".into());
    }
    let v = prep.template.substitute(&assignment_from(&prep.params, &values[..k]))?;
    let z = values[k..].to_vec();
    let outcome = verifier.check_instability(&v, f, &z)?;
    report.timings.verify_s = secs(verify_start);
    match outcome.verdict {
        Verdict::Valid => {
            report.certify(Status::NotGas, v);
            report.instability_witness_point = Some(z);
        }
        Verdict::Timeout => {
            report.status = Status::Timeout;
            report.diagnostics.push(format!("verification of V = {v} timed out"));
        }
        other => {
            report.status = Status::Unknown;
            report.diagnostics.push(format!("candidate V = {v} not certified: {other}"));
        }
    }
    Ok(report)
}
