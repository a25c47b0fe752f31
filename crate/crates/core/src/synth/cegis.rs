//! Counterexample-guided loop over sample constraints.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::complete::{assignment_from, param_names};
use super::lp::{solve_rows, LpOutcome};
use super::samples::{rows_with_margins, ConstraintSet, LinearRow, RowKind, SampleSet};
use super::{
    fmt_outcomes, mode_name, prepare, secs, settle_candidate, CertificateReport, Method, Preparation, Prepared, Status,
    SynthError, SynthesisConfig,
};
use crate::poly::{MultiIndex, Polynomial, VectorField};
use crate::rational::{from_f64_exact, limit_denominator, Rational};
use crate::smt::{emit, run_solver, Formula, QuantifiedFormula, Rel, SolverOutcome};
use crate::symred::ConstraintKind;
use crate::template::{Assignment, TemplateSpec};
use crate::verify::{verify_candidate, CandidateStatus, Mode, Verdict, Verifier};

/// Scalings by ten tried when rounding breaks a sample row.
const ROUNDING_RETRIES: u32 = 4;

/// One pass of the loop, kept for inspection.
#[derive(Clone, Debug)]
pub struct CegisStep {
    pub iteration: usize,
    pub assignment: Option<Assignment>,
    pub candidate: Option<Polynomial>,
    pub status: Option<CandidateStatus>,
    /// A point where the candidate provably violates a condition.
    pub counterexample: Option<Vec<Rational>>,
    pub note: String,
}

enum Proposal {
    Candidate(Assignment),
    /// No parameters satisfy this sample set.
    Infeasible,
    Stop(Status, String),
}

fn pending_rows(prep: &Prepared) -> ConstraintSet {
    let rows = prep
        .pending
        .iter()
        .filter(|c| c.kind == ConstraintKind::Nonpositivity)
        .map(|c| LinearRow {
            coeffs: prep.params.iter().map(|&id| c.form.coeff(id)).collect(),
            kind: RowKind::Le,
            rhs: -c.form.constant_part(),
            on_lie: false,
        })
        .collect();
    ConstraintSet { params: prep.params.clone(), rows }
}

fn rationalize(v: f64, denominator: Option<u64>) -> Rational {
    let exact = from_f64_exact(v).unwrap_or_else(Rational::zero);
    match denominator {
        Some(d) => limit_denominator(&exact, &BigInt::from(d)),
        None => exact,
    }
}

/// Rounds the LP solution, scaling it up by powers of ten while the rounded
/// values break a sample row. Scaling by `s >= 1` keeps every strengthened
/// row satisfied, since the `V` margins are nonnegative and the `V̇` margins
/// nonpositive; it only gives rounding more room.
fn round_within_rows(values: &[f64], denominator: Option<u64>, set: &ConstraintSet, extra: &ConstraintSet) -> (Vec<Rational>, u64) {
    let round = |scale: u64| -> Vec<Rational> { values.iter().map(|&v| rationalize(v * scale as f64, denominator)).collect() };
    if denominator.is_none() {
        return (round(1), 1);
    }
    let mut scale = 1;
    for _ in 0..ROUNDING_RETRIES {
        let rational = round(scale);
        if set.rows.iter().chain(&extra.rows).all(|r| r.holds(&rational)) {
            return (rational, scale);
        }
        scale *= 10;
    }
    (round(1), 1)
}

fn propose_lp(prep: &Prepared, samples: &SampleSet, config: &SynthesisConfig, mode: Mode, notes: &mut String) -> Proposal {
    let extra = pending_rows(prep);
    let zero = Rational::zero();
    let mut mu = config.mu.clone();
    for attempt in 0..2 {
        let lie_margin = if mode == Mode::Strict { &mu } else { &zero };
        let set = rows_with_margins(&prep.template, &prep.lie, &prep.params, samples.points(), Some(&mu), Some(lie_margin));
        match solve_rows(&set, &extra) {
            LpOutcome::Solved(values) => {
                let (rational, scale) = round_within_rows(&values, config.rounding_denominator, &set, &extra);
                if scale > 1 {
                    notes.push_str(&format!("rounding broke a sample row, LP solution scaled by {scale}; "));
                }
                return Proposal::Candidate(assignment_from(&prep.params, &rational));
            }
            LpOutcome::Infeasible if attempt == 0 => {
                mu = &mu / Rational::from_integer(2.into());
                notes.push_str("LP infeasible, retrying with mu/2; ");
            }
            LpOutcome::Infeasible => return Proposal::Infeasible,
            LpOutcome::Failed(why) => return Proposal::Stop(Status::Unknown, format!("LP failure: {why}")),
        }
    }
    Proposal::Infeasible
}

fn row_polynomial(row: &LinearRow, k: usize) -> Polynomial {
    let mut terms: Vec<(MultiIndex, Rational)> =
        row.coeffs.iter().enumerate().map(|(i, c)| (MultiIndex::unit(k, i), c.clone())).collect();
    terms.push((MultiIndex::zero(k), -row.rhs.clone()));
    Polynomial::from_terms(k, terms)
}

fn rel_of(kind: RowKind) -> Rel {
    match kind {
        RowKind::Gt => Rel::Gt,
        RowKind::Ge => Rel::Ge,
        RowKind::Lt => Rel::Lt,
        RowKind::Le => Rel::Le,
    }
}

fn propose_smt(prep: &Prepared, samples: &SampleSet, config: &SynthesisConfig, mode: Mode, verifier: &Verifier) -> Result<Proposal, SynthError> {
    let solver = verifier.solver.as_ref().ok_or(SynthError::SolverRequired(Method::SmtCegis))?;
    let k = prep.params.len();
    let mut set = rows_with_margins(&prep.template, &prep.lie, &prep.params, samples.points(), None, None);
    if mode != Mode::Strict {
        for row in set.rows.iter_mut().filter(|r| r.on_lie) {
            row.kind = RowKind::Le;
        }
    }
    set.rows.extend(pending_rows(prep).rows);
    let atoms: Vec<Formula> = set
        .rows
        .iter()
        .filter(|r| !r.coeffs.iter().all(Zero::is_zero) || !r.kind.holds(&Zero::zero(), &r.rhs))
        .map(|r| Formula::atom(row_polynomial(r, k), rel_of(r.kind)))
        .collect();
    let query = QuantifiedFormula {
        constants: param_names(&prep.params),
        universals: Vec::new(),
        side: Vec::new(),
        matrix: Formula::and(atoms),
    };
    Ok(match run_solver(solver, &emit(&query), config.timeout, &query.constants)? {
        SolverOutcome::Sat(model) => {
            let values = query.model_values(&model).expect("model covers every constant");
            Proposal::Candidate(assignment_from(&prep.params, &values))
        }
        SolverOutcome::Unsat => Proposal::Infeasible,
        SolverOutcome::Timeout => Proposal::Stop(Status::Timeout, "sample query timed out".into()),
        SolverOutcome::Unknown(why) => Proposal::Stop(Status::Unknown, why),
    })
}

/// [`cegis_with_trace`] without the trace.
pub fn cegis(
    f: &VectorField,
    spec: &TemplateSpec,
    config: &SynthesisConfig,
    mode: Mode,
    verifier: &Verifier,
) -> Result<CertificateReport, SynthError> {
    cegis_with_trace(f, spec, config, mode, verifier).map(|(r, _)| r)
}

/// Runs up to `cegis_steps` rounds of propose, verify, and refine. The
/// backend is chosen by `config.method` (`LpCegis` or `SmtCegis`).
pub fn cegis_with_trace(
    f: &VectorField,
    spec: &TemplateSpec,
    config: &SynthesisConfig,
    mode: Mode,
    verifier: &Verifier,
) -> Result<(CertificateReport, Vec<CegisStep>), SynthError> {
    config.validate()?;
    if config.method == Method::Complete {
        return Err(SynthError::Config("CEGIS needs the lp-cegis or smt-cegis method".into()));
    }
    let mut report = CertificateReport::new(&config.method.to_string(), mode_name(mode));
    let mut trace = Vec::new();
    let prep = match prepare(f, spec, config.reduction(), &mut report)? {
        Preparation::Ready(p) => p,
        Preparation::Infeasible(why) => {
            report.status = Status::TemplateInfeasible;
            report.diagnostics.push(why);
            return Ok((report, trace));
        }
    };
    let n = f.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut samples = SampleSet::new();
    samples.draw_uniform(n, config.n_samples, &config.domain_halfwidth, &mut rng);

    for iteration in 1..=config.cegis_steps {
        report.cegis_iterations = iteration;
        let mut note = String::new();
        let solve_start = Instant::now();
        let proposal = match config.method {
            Method::LpCegis => propose_lp(&prep, &samples, config, mode, &mut note),
            _ => propose_smt(&prep, &samples, config, mode, verifier)?,
        };
        report.timings.solve_s += secs(solve_start);
        let assignment = match proposal {
            Proposal::Candidate(a) => a,
            Proposal::Infeasible if config.method == Method::SmtCegis => {
                // sample conditions are necessary, so the template is ruled out
                report.status = Status::TemplateInfeasible;
                report.diagnostics.push("sample constraints are unsatisfiable".into());
                trace.push(CegisStep { iteration, assignment: None, candidate: None, status: None, counterexample: None, note });
                return Ok((report, trace));
            }
            Proposal::Infeasible => {
                note.push_str("TEMPLATE_INFEASIBLE for this sample set, drawing fresh samples");
                report.diagnostics.push(format!("step {iteration}: {note}"));
                trace.push(CegisStep { iteration, assignment: None, candidate: None, status: None, counterexample: None, note });
                samples = SampleSet::new();
                samples.draw_uniform(n, config.n_samples, &config.domain_halfwidth, &mut rng);
                continue;
            }
            Proposal::Stop(status, why) => {
                report.status = status;
                report.diagnostics.push(why);
                return Ok((report, trace));
            }
        };

        let verify_start = Instant::now();
        let v = prep.template.substitute(&assignment)?;
        let checked = verify_candidate(verifier, &v, f, mode, config.r_max)?;
        report.timings.verify_s += secs(verify_start);
        let confirmed = checked.outcomes.iter().find_map(|o| match &o.verdict {
            Verdict::Invalid(x) => Some(x.clone()),
            _ => None,
        });
        let mut step = CegisStep {
            iteration,
            assignment: Some(assignment),
            candidate: Some(v.clone()),
            status: Some(checked.status.clone()),
            counterexample: confirmed,
            note,
        };
        if settle_candidate(&mut report, v.clone(), &checked) {
            trace.push(step);
            return Ok((report, trace));
        }
        report.diagnostics.push(format!("step {iteration}: V = {v} rejected: {}", fmt_outcomes(&checked)));
        match checked.counterexample() {
            Some(x) if samples.push(x.to_vec()) => report.counterexamples_used += 1,
            _ => {
                // nothing new to learn from; widen the sample set instead
                let wider = &config.domain_halfwidth * Rational::from_integer(2.into());
                samples.draw_uniform(n, (config.n_samples / 10).max(1), &wider, &mut rng);
                step.note.push_str("no usable counterexample, added fresh samples");
            }
        }
        trace.push(step);
    }
    report.status = Status::Unknown;
    report.diagnostics.push(format!("no verified candidate after {} CEGIS steps", config.cegis_steps));
    Ok((report, trace))
}
