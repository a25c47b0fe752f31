//! Synthesis engines.
//!
//! * complete: one exists-forall SMT query over the template parameters
//! * LP-CEGIS: linear constraints at sample points, solved as an LP, with
//!   verification counterexamples fed back as new samples
//! * SMT-sample CEGIS: the same loop with the sample constraints handed to
//!   the SMT solver instead
//!
//! Each engine can run on the raw template or on the symbolically reduced
//! one. No report carries a certificate unless the verifier accepted the
//! exact rational witness.

mod cegis;
mod complete;
mod instability;
mod lp;
pub mod samples;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

pub use cegis::{cegis, cegis_with_trace, CegisStep};
pub use complete::synth_complete;
pub use instability::{synth_instability, InstabilityOptions};
pub use samples::{build_sample_constraints, ConstraintSet, LinearRow, RowKind, SampleSet};

use crate::lie::{lie_derivative, LieError};
use crate::poly::{default_var_names, Polynomial, VectorField};
use crate::rational::{ratio, serde_rational, Rational};
use crate::smt::SmtError;
use crate::symred::{reduce_to_fixpoint_with, ReductionConstraint, ReductionOptions, ReductionStatus, SymredError};
use crate::template::{build_template, fmt_substitutions, ParamId, ParamPoly, TemplateError, TemplateSpec};
use crate::verify::{CandidateReport, CandidateStatus, Mode, VerifyError};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Symred(#[from] SymredError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error("the {0} method needs an SMT solver")]
    SolverRequired(Method),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Complete,
    LpCegis,
    SmtCegis,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Complete => "complete",
            Method::LpCegis => "lp-cegis",
            Method::SmtCegis => "smt-cegis",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "complete" => Ok(Method::Complete),
            "lp-cegis" | "lp" => Ok(Method::LpCegis),
            "smt-cegis" | "smt-sample" => Ok(Method::SmtCegis),
            other => Err(format!("unknown method `{other}` (complete, lp-cegis, smt-cegis)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisConfig {
    pub method: Method,
    pub use_reduction: bool,
    /// Also apply the Newton-polytope vertex rule during reduction.
    pub newton_rule: bool,
    /// Margin scale in the strengthened sample constraints.
    pub mu: Rational,
    pub n_samples: usize,
    pub cegis_steps: usize,
    /// LP coefficients are rounded to this denominator; `None` keeps the
    /// exact binary value of the float.
    pub rounding_denominator: Option<u64>,
    pub domain_halfwidth: Rational,
    /// Per solver call.
    pub timeout: Duration,
    pub r_max: usize,
    /// Put the LaSalle chain condition into the synthesis query instead of
    /// only checking it afterwards.
    pub inline_lasalle: bool,
    pub seed: u64,
}

impl SynthesisConfig {
    pub fn new(method: Method) -> Self {
        SynthesisConfig {
            method,
            use_reduction: true,
            newton_rule: method != Method::Complete,
            mu: ratio(1, 100),
            n_samples: if method == Method::SmtCegis { 300 } else { 3000 },
            cegis_steps: 10,
            rounding_denominator: Some(100),
            domain_halfwidth: Rational::from_integer(10.into()),
            timeout: Duration::from_secs(60),
            r_max: crate::lasalle::DEFAULT_R_MAX,
            inline_lasalle: false,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.mu <= Rational::zero() {
            return Err(SynthError::Config("mu must be positive".into()));
        }
        if self.cegis_steps == 0 {
            return Err(SynthError::Config("cegis_steps must be at least 1".into()));
        }
        if self.domain_halfwidth <= Rational::zero() {
            return Err(SynthError::Config("domain half-width must be positive".into()));
        }
        if self.rounding_denominator == Some(0) {
            return Err(SynthError::Config("rounding denominator must be positive".into()));
        }
        if self.r_max < 2 {
            return Err(SynthError::Config("the LaSalle order must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Gas,
    GasLasalle,
    NotGas,
    Unknown,
    Timeout,
    TemplateInfeasible,
}

impl Status {
    pub fn has_certificate(self) -> bool {
        matches!(self, Status::Gas | Status::GasLasalle | Status::NotGas)
    }

    /// Process exit code for the command-line tool.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Gas | Status::GasLasalle | Status::NotGas => 0,
            Status::Unknown | Status::Timeout => 2,
            Status::TemplateInfeasible => 3,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Gas => "GAS",
            Status::GasLasalle => "GAS_LASALLE",
            Status::NotGas => "NOT_GAS",
            Status::Unknown => "UNKNOWN",
            Status::Timeout => "TIMEOUT",
            Status::TemplateInfeasible => "TEMPLATE_INFEASIBLE",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub reduction_s: f64,
    pub solve_s: f64,
    pub verify_s: f64,
}

/// Outcome of one synthesis run; serialized as one JSON object.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub system: String,
    pub status: Status,
    /// Rendered over the system's variable names.
    pub witness: Option<String>,
    #[serde(with = "serde_rational::vec_opt")]
    pub instability_witness_point: Option<Vec<Rational>>,
    pub method: String,
    pub mode: String,
    pub lasalle_order: Option<usize>,
    pub timings: Timings,
    pub cegis_iterations: usize,
    pub counterexamples_used: usize,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub witness_poly: Option<Polynomial>,
}

impl CertificateReport {
    pub(crate) fn new(method: &str, mode: &str) -> Self {
        CertificateReport {
            system: String::new(),
            status: Status::Unknown,
            witness: None,
            instability_witness_point: None,
            method: method.to_string(),
            mode: mode.to_string(),
            lasalle_order: None,
            timings: Timings::default(),
            cegis_iterations: 0,
            counterexamples_used: 0,
            diagnostics: Vec::new(),
            witness_poly: None,
        }
    }

    pub fn with_system(mut self, name: &str, vars: &[String]) -> Self {
        self.system = name.to_string();
        if let Some(w) = &self.witness_poly {
            self.witness = Some(w.display_with(vars));
        }
        self
    }

    pub(crate) fn certify(&mut self, status: Status, v: Polynomial) {
        self.status = status;
        self.witness = Some(v.to_string());
        self.witness_poly = Some(v);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub(crate) fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Strict => "strict",
        Mode::Weak => "weak",
        Mode::WeakLaSalle => "weak+lasalle",
    }
}

pub(crate) fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

impl SynthesisConfig {
    pub(crate) fn reduction(&self) -> Option<ReductionOptions> {
        self.use_reduction.then_some(ReductionOptions { newton_vertices: self.newton_rule })
    }
}

/// Template after the optional reduction, ready for a backend.
pub(crate) struct Prepared {
    pub template: ParamPoly,
    pub lie: ParamPoly,
    pub params: Vec<ParamId>,
    /// Necessary conditions `form <= 0` left over from the reduction.
    pub pending: Vec<ReductionConstraint>,
}

pub(crate) enum Preparation {
    Ready(Prepared),
    /// The reduction ruled out every nonzero candidate of this shape.
    Infeasible(String),
}

pub(crate) fn prepare(
    f: &VectorField,
    spec: &TemplateSpec,
    reduction: Option<ReductionOptions>,
    report: &mut CertificateReport,
) -> Result<Preparation, SynthError> {
    let start = Instant::now();
    let raw = build_template(spec)?;
    if raw.nvars() != f.nvars() {
        return Err(SynthError::Config(format!(
            "template has {} variables but the system has {}",
            raw.nvars(),
            f.nvars()
        )));
    }
    let prepared = if let Some(options) = reduction {
        let red = reduce_to_fixpoint_with(&raw, f, options)?;
        report.diagnostics.push(format!(
            "reduction: {:?} after {} pass(es), {} of {} parameters left",
            red.status,
            red.iterations,
            red.surviving_params().len(),
            raw.params().len()
        ));
        if !red.substitutions.is_empty() {
            report.diagnostics.push(format!("substitutions: {}", fmt_substitutions(&red.substitutions).join(", ")));
        }
        match red.status {
            ReductionStatus::Reduced => {}
            ReductionStatus::Collapsed => {
                report.timings.reduction_s = secs(start);
                return Ok(Preparation::Infeasible("reduction eliminated every parameter".into()));
            }
            ReductionStatus::Infeasible => {
                report.timings.reduction_s = secs(start);
                return Ok(Preparation::Infeasible("reduction found contradictory necessary conditions".into()));
            }
        }
        let params = red.surviving_params();
        Prepared { template: red.reduced_template, lie: red.reduced_lie, params, pending: red.inequalities_pending }
    } else {
        let lie = lie_derivative(&raw, f)?;
        let params = raw.params();
        Prepared { template: raw, lie, params, pending: Vec::new() }
    };
    report.timings.reduction_s = secs(start);
    report.diagnostics.push(format!("template: V = {}", prepared.template.display_grouped()));
    Ok(Preparation::Ready(prepared))
}

/// Maps a verifier verdict on a synthesized candidate onto the report.
pub(crate) fn settle_candidate(report: &mut CertificateReport, v: Polynomial, verdict: &CandidateReport) -> bool {
    match verdict.status {
        CandidateStatus::Gas => {
            report.certify(Status::Gas, v);
            true
        }
        CandidateStatus::GasLaSalle(r) => {
            report.lasalle_order = Some(r);
            report.certify(Status::GasLasalle, v);
            true
        }
        CandidateStatus::WeakOnly => {
            report.status = Status::Unknown;
            report.diagnostics.push(format!("weak conditions hold for V = {v}, which alone does not prove GAS"));
            false
        }
        CandidateStatus::Timeout => {
            report.status = Status::Timeout;
            false
        }
        CandidateStatus::Rejected | CandidateStatus::Unknown => {
            report.status = Status::Unknown;
            false
        }
    }
}

pub(crate) fn fmt_outcomes(report: &CandidateReport) -> String {
    report.outcomes.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub(crate) fn state_names(n: usize) -> Vec<String> {
    default_var_names(n)
}
