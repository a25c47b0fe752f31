//! Complete synthesis: `∃c ∀x (x ≠ 0 ⇒ V > 0 ∧ V̇ < 0)`, or the weak
//! variant with `V̇ <= 0`, as a single solver query.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    fmt_outcomes, mode_name, prepare, secs, settle_candidate, state_names, CertificateReport, Method, Preparation,
    Prepared, Status, SynthError, SynthesisConfig,
};
use crate::lasalle::{lasalle_formula, Variant};
use crate::lie::LieChain;
use crate::poly::{MultiIndex, Polynomial, VectorField};
use crate::smt::{emit, model_spot_check, nonzero_state, run_solver, Formula, QuantifiedFormula, Rel, SolverOutcome};
use crate::symred::ConstraintKind;
use crate::template::{Assignment, ParamId, ParamPoly, TemplateSpec};
use crate::verify::{verify_candidate, Mode, Verifier};

/// Pending reduction constraints `form <= 0` as assertions over the parameters.
pub(crate) fn pending_side(prep: &Prepared, total: usize) -> Vec<Formula> {
    let n = prep.template.nvars();
    prep.pending
        .iter()
        .filter(|c| c.kind == ConstraintKind::Nonpositivity)
        .map(|c| {
            let mut holder = ParamPoly::zero(n);
            holder.add_term(MultiIndex::zero(n), c.form.clone());
            let p = holder.to_joint_polynomial(&prep.params);
            Formula::atom(pad(&p, total), Rel::Le)
        })
        .collect()
}

/// Appends unused trailing variables.
pub(crate) fn pad(p: &Polynomial, total: usize) -> Polynomial {
    if p.nvars() == total {
        return p.clone();
    }
    let extra = MultiIndex::zero(total - p.nvars());
    Polynomial::from_terms(total, p.terms().map(|(m, c)| (m.concat(&extra), c.clone())).collect::<Vec<_>>())
}

pub(crate) fn param_names(ids: &[ParamId]) -> Vec<String> {
    ids.iter().map(|id| id.name()).collect()
}

pub(crate) fn assignment_from(ids: &[ParamId], values: &[crate::rational::Rational]) -> Assignment {
    ids.iter().copied().zip(values.iter().cloned()).collect()
}

fn lyapunov_query(prep: &Prepared, f: &VectorField, mode: Mode, config: &SynthesisConfig) -> Result<QuantifiedFormula, SynthError> {
    let k = prep.params.len();
    let n = prep.template.nvars();
    let total = k + n;
    let v = prep.template.to_joint_polynomial(&prep.params);
    let vdot = prep.lie.to_joint_polynomial(&prep.params);
    let nonzero = nonzero_state(k, n, total);
    let matrix = match mode {
        Mode::Strict => Formula::implies(
            nonzero,
            Formula::and(vec![Formula::atom(v, Rel::Gt), Formula::atom(vdot, Rel::Lt)]),
        ),
        Mode::Weak | Mode::WeakLaSalle => {
            let mut parts = vec![Formula::implies(nonzero, Formula::atom(v, Rel::Gt)), Formula::atom(vdot, Rel::Le)];
            if mode == Mode::WeakLaSalle && config.inline_lasalle {
                let mut chain = LieChain::new(prep.template.clone(), f.clone())?;
                chain.extend_to(config.r_max)?;
                let derivs: Vec<Polynomial> =
                    chain.derivatives()[..config.r_max].iter().map(|d| d.to_joint_polynomial(&prep.params)).collect();
                parts.push(lasalle_formula(&derivs, k, n, Variant::Disjunctive).0);
            }
            Formula::and(parts)
        }
    };
    Ok(QuantifiedFormula {
        constants: param_names(&prep.params),
        universals: state_names(n),
        side: pending_side(prep, total),
        matrix,
    })
}

/// Exists-forall synthesis on a template, followed by exact verification of
/// the solver's model.
pub fn synth_complete(
    f: &VectorField,
    spec: &TemplateSpec,
    config: &SynthesisConfig,
    mode: Mode,
    verifier: &Verifier,
) -> Result<CertificateReport, SynthError> {
    config.validate()?;
    let solver = verifier.solver.clone().ok_or(SynthError::SolverRequired(Method::Complete))?;
    let mut report = CertificateReport::new(&Method::Complete.to_string(), mode_name(mode));
    let prep = match prepare(f, spec, config.reduction(), &mut report)? {
        Preparation::Ready(p) => p,
        Preparation::Infeasible(why) => {
            report.status = Status::TemplateInfeasible;
            report.diagnostics.push(why);
            return Ok(report);
        }
    };

    let solve_start = Instant::now();
    let query = lyapunov_query(&prep, f, mode, config)?;
    let script = emit(&query);
    let outcome = run_solver(&solver, &script, config.timeout, &query.constants)?;
    report.timings.solve_s = secs(solve_start);
    report.cegis_iterations = 1;

    let model = match outcome {
        SolverOutcome::Sat(m) => m,
        SolverOutcome::Unsat => {
            report.status = Status::TemplateInfeasible;
            report.diagnostics.push("no assignment of this template satisfies the conditions".into());
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
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    if !model_spot_check(&query, &model, 100, &mut rng) {
        report.diagnostics.push("solver model failed the random spot check".into());
    }
    let values = query.model_values(&model).expect("model covers every constant");
    let v = prep.template.substitute(&assignment_from(&prep.params, &values))?;
    let checked = verify_candidate(verifier, &v, f, mode, config.r_max)?;
    report.timings.verify_s = secs(verify_start);
    if !settle_candidate(&mut report, v.clone(), &checked) {
        report.diagnostics.push(format!("candidate V = {v} not certified: {}", fmt_outcomes(&checked)));
    }
    Ok(report)
}
