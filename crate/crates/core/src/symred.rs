//! Symbolic template reduction.
//!
//! A polynomial that is nonpositive everywhere has even extreme degrees,
//! even maximal exponents per variable, and nonpositive extreme pure powers.
//! Applied to the coefficients of `V̇` (affine in the template parameters)
//! these necessary conditions become linear equalities and inequalities.
//! Equalities are eliminated immediately; inequalities are forwarded.
//!
//! An optional extra rule looks at the whole Newton polytope: each of its
//! vertices must carry an even exponent and a nonpositive coefficient. It
//! catches odd monomials in intermediate layers that the layer rules miss.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lie::{lie_derivative, LieError};
use crate::poly::{MultiIndex, VectorField};
use crate::template::{apply_equalities, AffineForm, ParamId, ParamPoly, TemplateError};

#[derive(Debug, Error)]
pub enum SymredError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum ConstraintKind {
    /// `form = 0`
    Equality,
    /// `form <= 0`
    Nonpositivity,
}

/// Which necessary condition produced a constraint.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub enum Rule {
    ExtremeLayer,
    MaxExponent,
    LayerMaxExponent,
    PurePower,
    NewtonVertex,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::ExtremeLayer => "R1-extreme-layer",
            Rule::MaxExponent => "R2-max-exponent",
            Rule::LayerMaxExponent => "R3-layer-max-exponent",
            Rule::PurePower => "R4-pure-power",
            Rule::NewtonVertex => "newton-vertex",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionConstraint {
    pub kind: ConstraintKind,
    pub form: AffineForm,
    pub rule: Rule,
}

impl ReductionConstraint {
    /// A parameter-free constraint that fails outright.
    pub fn is_violated(&self) -> bool {
        if !self.form.is_constant() {
            return false;
        }
        let c = self.form.constant_part();
        match self.kind {
            ConstraintKind::Equality => !c.is_zero(),
            ConstraintKind::Nonpositivity => c.is_positive(),
        }
    }

    /// A parameter-free constraint that always holds.
    pub fn is_trivial(&self) -> bool {
        self.form.is_constant() && !self.is_violated()
    }

    pub fn holds_at(&self, assignment: &crate::template::Assignment) -> Result<bool, TemplateError> {
        let v = self.form.evaluate(assignment)?;
        Ok(match self.kind {
            ConstraintKind::Equality => v.is_zero(),
            ConstraintKind::Nonpositivity => !v.is_positive(),
        })
    }
}

impl fmt::Display for ReductionConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.kind {
            ConstraintKind::Equality => "=",
            ConstraintKind::Nonpositivity => "<=",
        };
        write!(f, "{} {} 0  [{}]", self.form, rel, self.rule.tag())
    }
}

struct Collector {
    out: Vec<ReductionConstraint>,
}

impl Collector {
    fn push(&mut self, kind: ConstraintKind, form: AffineForm, rule: Rule) {
        if form.is_zero() {
            return;
        }
        if self.out.iter().any(|c| c.kind == kind && c.form == form) {
            return;
        }
        self.out.push(ReductionConstraint { kind, form, rule });
    }

    /// Every coefficient whose monomial reaches an odd maximal exponent.
    fn odd_max_exponents<'a, I>(&mut self, terms: I, nvars: usize, rule: Rule)
    where
        I: Iterator<Item = (&'a MultiIndex, &'a AffineForm)> + Clone,
    {
        for i in 0..nvars {
            let Some(m) = terms.clone().map(|(a, _)| a.get(i)).max() else { continue };
            if m % 2 == 1 {
                for (a, form) in terms.clone().filter(|(a, _)| a.get(i) == m) {
                    let _ = a;
                    self.push(ConstraintKind::Equality, form.clone(), rule);
                }
            }
        }
    }
}

/// Which rules beyond the four layer and exponent rules are enabled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReductionOptions {
    pub newton_vertices: bool,
}

impl ReductionOptions {
    pub fn extended() -> Self {
        ReductionOptions { newton_vertices: true }
    }
}

/// Whether `point` lies in the convex hull of `others`.
fn in_hull(point: &MultiIndex, others: &[&MultiIndex]) -> bool {
    use microlp::{ComparisonOp, OptimizationDirection, Problem};
    if others.is_empty() {
        return false;
    }
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let lambda: Vec<_> = others.iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    lp.add_constraint(lambda.iter().map(|&l| (l, 1.0)).collect::<Vec<_>>(), ComparisonOp::Eq, 1.0);
    for i in 0..point.len() {
        let row: Vec<_> = lambda
            .iter()
            .zip(others)
            .map(|(&l, m)| (l, f64::from(m.get(i))))
            .filter(|(_, e)| *e != 0.0)
            .collect();
        lp.add_constraint(row, ComparisonOp::Eq, f64::from(point.get(i)));
    }
    lp.solve().is_ok()
}

/// If the coefficient at a vertex `v` of the hull of the support is nonzero,
/// `v` is also a vertex of the true Newton polytope, so the sign of `p`
/// along the matching curve `x = t^w` is the sign of that coefficient.
fn newton_vertices(p: &ParamPoly, c: &mut Collector) {
    let support: Vec<(&MultiIndex, &AffineForm)> = p.terms().collect();
    for (k, (m, form)) in support.iter().enumerate() {
        let others: Vec<&MultiIndex> =
            support.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, (a, _))| *a).collect();
        if in_hull(m, &others) {
            continue;
        }
        let even = (0..m.len()).all(|i| m.get(i) % 2 == 0);
        let kind = if even { ConstraintKind::Nonpositivity } else { ConstraintKind::Equality };
        c.push(kind, (*form).clone(), Rule::NewtonVertex);
    }
}

/// Necessary conditions for `p(x) <= 0` on all of `ℝ^n`, treating every
/// coefficient that is not identically zero as generically nonzero.
pub fn extract_constraints(p: &ParamPoly) -> Vec<ReductionConstraint> {
    extract_constraints_with(p, ReductionOptions::default())
}

pub fn extract_constraints_with(p: &ParamPoly, options: ReductionOptions) -> Vec<ReductionConstraint> {
    let mut c = Collector { out: Vec::new() };
    let (Some(l), Some(k)) = (p.lowest_degree(), p.highest_degree()) else {
        return c.out;
    };
    let n = p.nvars();

    for d in [l, k] {
        if d % 2 == 1 {
            for (_, form) in p.terms().filter(|(m, _)| m.degree() == d) {
                c.push(ConstraintKind::Equality, form.clone(), Rule::ExtremeLayer);
            }
        }
    }

    c.odd_max_exponents(p.terms(), n, Rule::MaxExponent);

    for d in [l, k] {
        c.odd_max_exponents(p.terms().filter(move |(m, _)| m.degree() == d), n, Rule::LayerMaxExponent);
    }

    for i in 0..n {
        let pure: Vec<(u32, &AffineForm)> = p
            .terms()
            .filter_map(|(m, form)| match m.as_pure_power() {
                Some((j, d)) if j == i => Some((d, form)),
                _ => None,
            })
            .collect();
        let (Some(first), Some(last)) = (pure.first(), pure.last()) else { continue };
        for (d, form) in [first, last] {
            if d % 2 == 1 {
                c.push(ConstraintKind::Equality, (*form).clone(), Rule::PurePower);
            } else {
                c.push(ConstraintKind::Nonpositivity, (*form).clone(), Rule::PurePower);
            }
        }
    }
    if options.newton_vertices {
        newton_vertices(p, &mut c);
    }
    c.out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReductionStatus {
    /// Fixpoint reached with a nonzero template.
    Reduced,
    /// Every parameter was forced to zero.
    Collapsed,
    /// A parameter-free necessary condition fails, or the equalities clash.
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub status: ReductionStatus,
    pub reduced_template: ParamPoly,
    pub reduced_lie: ParamPoly,
    /// Eliminated parameter ↦ affine form over the surviving parameters.
    pub substitutions: BTreeMap<ParamId, AffineForm>,
    pub equalities_applied: Vec<ReductionConstraint>,
    pub inequalities_pending: Vec<ReductionConstraint>,
    /// Passes that eliminated at least one parameter.
    pub iterations: usize,
}

impl ReductionResult {
    pub fn surviving_params(&self) -> Vec<ParamId> {
        self.reduced_template.params()
    }
}

/// Computes `V̇`, extracts constraints, eliminates the equalities and repeats
/// until no new equality appears or the template vanishes.
pub fn reduce_to_fixpoint(v: &ParamPoly, f: &VectorField) -> Result<ReductionResult, SymredError> {
    reduce_to_fixpoint_with(v, f, ReductionOptions::default())
}

pub fn reduce_to_fixpoint_with(
    v: &ParamPoly,
    f: &VectorField,
    options: ReductionOptions,
) -> Result<ReductionResult, SymredError> {
    let mut template = v.clone();
    let mut substitutions: BTreeMap<ParamId, AffineForm> = BTreeMap::new();
    let mut applied = Vec::new();
    let mut iterations = 0;
    loop {
        let vdot = lie_derivative(&template, f)?;
        let constraints = extract_constraints_with(&vdot, options);
        let finish = |status, pending: Vec<ReductionConstraint>, template: ParamPoly, vdot, substitutions, applied, iterations| {
            Ok(ReductionResult {
                status,
                reduced_template: template,
                reduced_lie: vdot,
                substitutions,
                equalities_applied: applied,
                inequalities_pending: pending,
                iterations,
            })
        };
        if constraints.iter().any(ReductionConstraint::is_violated) {
            return finish(ReductionStatus::Infeasible, constraints, template, vdot, substitutions, applied, iterations);
        }
        let (eqs, ineqs): (Vec<_>, Vec<_>) = constraints
            .into_iter()
            .filter(|c| !c.is_trivial())
            .partition(|c| c.kind == ConstraintKind::Equality);
        if eqs.is_empty() {
            let status = if template.is_zero() { ReductionStatus::Collapsed } else { ReductionStatus::Reduced };
            return finish(status, ineqs, template, vdot, substitutions, applied, iterations);
        }
        let forms: Vec<AffineForm> = eqs.iter().map(|c| c.form.clone()).collect();
        let (next, step) = match apply_equalities(&template, &forms) {
            Ok(r) => r,
            Err(TemplateError::Inconsistent(_)) => {
                return finish(ReductionStatus::Infeasible, eqs, template, vdot, substitutions, applied, iterations);
            }
            Err(e) => return Err(e.into()),
        };
        for form in substitutions.values_mut() {
            *form = form.substitute(&step);
        }
        substitutions.extend(step);
        applied.extend(eqs);
        iterations += 1;
        template = next;
        if template.is_zero() {
            let vdot = ParamPoly::zero(template.nvars());
            return finish(ReductionStatus::Collapsed, Vec::new(), template, vdot, substitutions, applied, iterations);
        }
    }
}
