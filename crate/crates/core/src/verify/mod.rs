//! Exact verification of candidate certificates.
//!
//! Every check is phrased as "find a point violating the claim". With a
//! solver configured, UNSAT means the claim is valid. A violating point is
//! always re-evaluated in exact arithmetic before it is reported, and the
//! numeric falsifier can refute but never certify.

mod falsify;

use std::fmt;
use std::time::Duration;

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub use falsify::{falsify_numeric, FalsifyConfig};

use crate::lie::{lie_derivative, LieChain, LieError};
use crate::poly::{default_var_names, PolyError, Polynomial, VectorField};
use crate::rational::{fmt_rational, Rational};
use crate::smt::{
    approximate_model, emit, nonzero_state, run_solver, Formula, QuantifiedFormula, Rel, SmtError, SolverConfig,
    SolverOutcome,
};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// Exactly confirmed violating point.
    Invalid(Vec<Rational>),
    /// `hint` is an approximate violating point when the solver found an
    /// algebraic one; useful as a CEGIS sample, never as evidence.
    Unknown { reason: String, hint: Option<Vec<Rational>> },
    Timeout,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            Verdict::Invalid(x) => Some(x),
            Verdict::Unknown { hint: Some(x), .. } => Some(x),
            _ => None,
        }
    }

    fn unknown(reason: impl Into<String>) -> Self {
        Verdict::Unknown { reason: reason.into(), hint: None }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => write!(f, "VALID"),
            Verdict::Invalid(x) => write!(f, "INVALID at ({})", x.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")),
            Verdict::Unknown { reason, .. } => write!(f, "UNKNOWN ({reason})"),
            Verdict::Timeout => write!(f, "TIMEOUT"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Check {
    /// positive definite
    Pd,
    /// radially unbounded
    Ru,
    /// negative definite
    Nd,
    /// negative semidefinite
    Nsd,
    LaSalle(usize),
    Instab,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Pd => write!(f, "PD"),
            Check::Ru => write!(f, "RU"),
            Check::Nd => write!(f, "ND"),
            Check::Nsd => write!(f, "NSD"),
            Check::LaSalle(r) => write!(f, "LASALLE({r})"),
            Check::Instab => write!(f, "INSTAB"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationOutcome {
    pub check: Check,
    pub verdict: Verdict,
}

impl fmt::Display for VerificationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.verdict)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strictness {
    NegativeDefinite,
    NegativeSemidefinite,
}

/// Verification backend: an optional SMT solver plus the numeric falsifier.
#[derive(Clone, Debug)]
pub struct Verifier {
    pub solver: Option<SolverConfig>,
    pub timeout: Duration,
    pub falsify: FalsifyConfig,
    pub seed: u64,
}

impl Verifier {
    pub fn new(solver: Option<SolverConfig>, timeout: Duration) -> Self {
        Verifier { solver, timeout, falsify: FalsifyConfig::default(), seed: 0x5eed }
    }

    /// Falsifier only.
    pub fn numeric() -> Self {
        Self::new(None, Duration::from_secs(0))
    }

    pub fn has_solver(&self) -> bool {
        self.solver.is_some()
    }

    fn falsifier(&self, violation: &Formula, n: usize) -> Option<Vec<Rational>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        falsify_numeric(violation, n, &self.falsify, &mut rng)
    }

    /// Looks for `x ∈ ℝ^n` satisfying `violation`. `strict` is an optional
    /// stronger violation whose solutions tend to be rational.
    pub fn refute(&self, n: usize, violation: &Formula, strict: Option<&Formula>) -> Result<Verdict, VerifyError> {
        let Some(solver) = &self.solver else {
            return Ok(match self.falsifier(violation, n) {
                Some(x) => Verdict::Invalid(x),
                None => Verdict::unknown("no solver configured; numeric search found no violation"),
            });
        };
        let vars = default_var_names(n);
        let query = |f: &Formula| -> Result<(SolverOutcome, String), VerifyError> {
            let script = emit(&QuantifiedFormula::counterexample_query(vars.clone(), f.clone()));
            Ok((run_solver(solver, &script, self.timeout, &vars)?, script))
        };
        let (outcome, script) = query(violation)?;
        let confirmed = |model: &crate::smt::Model, f: &Formula| {
            let x: Vec<Rational> = vars.iter().map(|v| model[v].clone()).collect();
            f.eval(&x).ok().filter(|&hit| hit).map(|_| x)
        };
        match outcome {
            SolverOutcome::Unsat => Ok(Verdict::Valid),
            SolverOutcome::Sat(model) => Ok(match confirmed(&model, violation) {
                Some(x) => Verdict::Invalid(x),
                None => Verdict::Unknown {
                    reason: "solver model failed exact re-evaluation".into(),
                    hint: Some(vars.iter().map(|v| model[v].clone()).collect()),
                },
            }),
            SolverOutcome::Unknown(reason) => {
                if let Some(s) = strict {
                    if let (SolverOutcome::Sat(model), _) = query(s)? {
                        if let Some(x) = confirmed(&model, violation) {
                            return Ok(Verdict::Invalid(x));
                        }
                    }
                }
                if let Some(x) = self.falsifier(violation, n) {
                    return Ok(Verdict::Invalid(x));
                }
                let hint = approximate_model(solver, &script, self.timeout, &vars)
                    .map(|m| vars.iter().map(|v| m[v].clone()).collect());
                Ok(Verdict::Unknown { reason, hint })
            }
            SolverOutcome::Timeout => Ok(match self.falsifier(violation, n) {
                Some(x) => Verdict::Invalid(x),
                None => Verdict::Timeout,
            }),
        }
    }

    /// `V(0) = 0` and `V(x) > 0` for `x ≠ 0`.
    pub fn check_pd(&self, v: &Polynomial) -> Result<VerificationOutcome, VerifyError> {
        let n = v.nvars();
        let verdict = if !v.constant_term().is_zero() {
            Verdict::Invalid(vec![Rational::zero(); n])
        } else {
            let violation = Formula::and(vec![nonzero_state(0, n, n), Formula::atom(v.clone(), Rel::Le)]);
            let strict = Formula::atom(v.clone(), Rel::Lt);
            self.refute(n, &violation, Some(&strict))?
        };
        Ok(VerificationOutcome { check: Check::Pd, verdict })
    }

    /// Sufficient check for radial unboundedness; failure is UNKNOWN, not INVALID.
    pub fn check_ru(&self, v: &Polynomial) -> Result<VerificationOutcome, VerifyError> {
        let n = v.nvars();
        let mut covered = vec![false; n];
        let diagonal = !v.is_zero()
            && v.terms().all(|(m, c)| match m.as_pure_power() {
                Some((i, d)) if d % 2 == 0 && c.is_positive() => {
                    covered[i] = true;
                    true
                }
                _ => false,
            });
        if diagonal && covered.iter().all(|&b| b) {
            return Ok(VerificationOutcome { check: Check::Ru, verdict: Verdict::Valid });
        }
        let top = v.highest_layer();
        let violation = Formula::and(vec![nonzero_state(0, n, n), Formula::atom(top.clone(), Rel::Le)]);
        let strict = Formula::atom(top, Rel::Lt);
        let verdict = match self.refute(n, &violation, Some(&strict))? {
            Verdict::Valid => Verdict::Valid,
            Verdict::Invalid(_) => Verdict::unknown("top homogeneous layer is not positive definite"),
            Verdict::Unknown { reason, .. } => Verdict::unknown(reason),
            Verdict::Timeout => Verdict::unknown("timeout on the top-layer check"),
        };
        Ok(VerificationOutcome { check: Check::Ru, verdict })
    }

    /// `p(x) < 0` for `x ≠ 0`, or `p(x) <= 0` everywhere.
    pub fn check_sign(&self, p: &Polynomial, strictness: Strictness) -> Result<VerificationOutcome, VerifyError> {
        let n = p.nvars();
        let positive = Formula::atom(p.clone(), Rel::Gt);
        let (check, verdict) = match strictness {
            Strictness::NegativeDefinite => {
                let violation = Formula::and(vec![nonzero_state(0, n, n), Formula::atom(p.clone(), Rel::Ge)]);
                (Check::Nd, self.refute(n, &violation, Some(&positive))?)
            }
            Strictness::NegativeSemidefinite => (Check::Nsd, self.refute(n, &positive, None)?),
        };
        Ok(VerificationOutcome { check, verdict })
    }

    /// Conditional instability certificate: `V̇ <= 0` wherever `V <= 0`,
    /// and `V(z) < V(0)`.
    pub fn check_instability(&self, v: &Polynomial, f: &VectorField, z: &[Rational]) -> Result<VerificationOutcome, VerifyError> {
        let n = v.nvars();
        let at_z = v.evaluate(z)?;
        if at_z >= v.constant_term() {
            return Ok(VerificationOutcome {
                check: Check::Instab,
                verdict: Verdict::unknown(format!("V(z) = {} is not below V(0)", fmt_rational(&at_z))),
            });
        }
        let vdot = lie_derivative(v, f)?;
        let shifted = v - &Polynomial::constant(n, v.constant_term());
        let violation = Formula::and(vec![Formula::atom(shifted.clone(), Rel::Le), Formula::atom(vdot.clone(), Rel::Gt)]);
        let strict = Formula::and(vec![Formula::atom(shifted, Rel::Lt), Formula::atom(vdot, Rel::Gt)]);
        let verdict = self.refute(n, &violation, Some(&strict))?;
        Ok(VerificationOutcome { check: Check::Instab, verdict })
    }

    /// One LaSalle order (or the disjunction up to `r`) on a precomputed chain.
    pub fn check_lasalle_order(
        &self,
        chain: &mut LieChain<Polynomial>,
        r: usize,
        variant: crate::lasalle::Variant,
    ) -> Result<VerificationOutcome, VerifyError> {
        let enc = crate::lasalle::build_lasalle(chain, r, variant)?;
        let n = chain.base().nvars();
        let verdict = self.refute(n, &enc.violation, None)?;
        Ok(VerificationOutcome { check: Check::LaSalle(r), verdict })
    }
}

/// What a candidate must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Theorem-1 style: `V̇` negative definite.
    Strict,
    /// `V̇` negative semidefinite only; not a GAS proof by itself.
    Weak,
    /// Strict if possible, else semidefinite plus the LaSalle chain condition.
    WeakLaSalle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CandidateStatus {
    Gas,
    /// GAS through the invariance principle at the given order.
    GasLaSalle(usize),
    /// Only the weak conditions were requested and they hold.
    WeakOnly,
    Rejected,
    Unknown,
    Timeout,
}

/// Every check run on a candidate, in order, with the overall status.
#[derive(Clone, Debug)]
pub struct CandidateReport {
    pub status: CandidateStatus,
    pub outcomes: Vec<VerificationOutcome>,
}

impl CandidateReport {
    /// First violating (or approximately violating) point among the outcomes.
    pub fn counterexample(&self) -> Option<&[Rational]> {
        self.outcomes.iter().find_map(|o| o.verdict.point())
    }

    fn settle(outcomes: Vec<VerificationOutcome>) -> Self {
        let last = &outcomes.last().expect("at least one check").verdict;
        let status = match last {
            Verdict::Invalid(_) => CandidateStatus::Rejected,
            Verdict::Timeout => CandidateStatus::Timeout,
            _ => CandidateStatus::Unknown,
        };
        CandidateReport { status, outcomes }
    }
}

/// Full pipeline on a concrete candidate: PD, RU, then the sign condition
/// (and the LaSalle scan when the mode asks for it).
pub fn verify_candidate(
    verifier: &Verifier,
    v: &Polynomial,
    f: &VectorField,
    mode: Mode,
    r_max: usize,
) -> Result<CandidateReport, VerifyError> {
    let mut outcomes = Vec::new();
    // an inconclusive PD or RU check still lets a later check refute the candidate
    let mut inconclusive = false;
    for step in [verifier.check_pd(v)?, verifier.check_ru(v)?] {
        match &step.verdict {
            Verdict::Valid => outcomes.push(step),
            Verdict::Unknown { .. } => {
                inconclusive = true;
                outcomes.push(step);
            }
            _ => {
                outcomes.push(step);
                return Ok(CandidateReport::settle(outcomes));
            }
        }
    }
    let vdot = lie_derivative(v, f)?;
    let finish = |outcomes: Vec<VerificationOutcome>| {
        let mut report = CandidateReport::settle(outcomes);
        if report.status != CandidateStatus::Rejected {
            report.status = CandidateStatus::Unknown;
        }
        report
    };
    if mode != Mode::Weak {
        let nd = verifier.check_sign(&vdot, Strictness::NegativeDefinite)?;
        let ok = nd.verdict.is_valid();
        outcomes.push(nd);
        if ok && inconclusive {
            return Ok(finish(outcomes));
        }
        if ok {
            return Ok(CandidateReport { status: CandidateStatus::Gas, outcomes });
        }
        if mode == Mode::Strict {
            return Ok(CandidateReport::settle(outcomes));
        }
    }
    let nsd = verifier.check_sign(&vdot, Strictness::NegativeSemidefinite)?;
    let ok = nsd.verdict.is_valid();
    outcomes.push(nsd);
    if !ok {
        return Ok(CandidateReport::settle(outcomes));
    }
    if inconclusive {
        return Ok(finish(outcomes));
    }
    if mode == Mode::Weak {
        return Ok(CandidateReport { status: CandidateStatus::WeakOnly, outcomes });
    }
    let scan = crate::lasalle::lasalle_scan(verifier, v, f, r_max)?;
    let verified = scan.r_used;
    outcomes.extend(scan.outcomes);
    Ok(match verified {
        Some(r) => CandidateReport { status: CandidateStatus::GasLaSalle(r), outcomes },
        None => {
            let mut report = CandidateReport::settle(outcomes);
            // a failed sufficient condition does not refute GAS
            if report.status == CandidateStatus::Rejected {
                report.status = CandidateStatus::Unknown;
            }
            report
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::rational::int;

    fn p(text: &str) -> Polynomial {
        parse_polynomial(text, &default_var_names(2)).unwrap()
    }

    #[test]
    fn diagonal_rule_for_radial_unboundedness() {
        let v = Verifier::numeric();
        assert!(v.check_ru(&p("x1^4 + 2*x2^2")).unwrap().verdict.is_valid());
        assert!(!v.check_ru(&p("x1^4 + x1*x2 + x2^2")).unwrap().verdict.is_valid());
        assert!(!v.check_ru(&p("x1^4")).unwrap().verdict.is_valid());
    }

    #[test]
    fn numeric_refutations_are_exact() {
        let v = Verifier::numeric();
        let pd = v.check_pd(&p("x1^2")).unwrap();
        let Verdict::Invalid(x) = &pd.verdict else { panic!("{pd}") };
        assert!(p("x1^2").evaluate(x).unwrap() <= int(0));
        assert!(x.iter().any(|c| !c.is_zero()));
        let nd = v.check_sign(&p("-4*x2^4"), Strictness::NegativeDefinite).unwrap();
        assert!(matches!(nd.verdict, Verdict::Invalid(_)));
        let nsd = v.check_sign(&p("-4*x2^4"), Strictness::NegativeSemidefinite).unwrap();
        assert!(matches!(nsd.verdict, Verdict::Unknown { .. }));
        let odd = v.check_sign(&p("x1^6*x2"), Strictness::NegativeSemidefinite).unwrap();
        assert!(matches!(odd.verdict, Verdict::Invalid(_)));
    }
}
