//! Floating-point LP over sample constraints.
//!
//! Rows are scaled to unit max-coefficient before they reach the solver,
//! since sample rows span many orders of magnitude. The result is only a
//! proposal: it is rationalized and verified exactly afterwards.

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use num_traits::Zero;

use super::samples::{ConstraintSet, RowKind};
use crate::rational::to_f64;

/// Box bound on every parameter.
pub(crate) const COEFF_BOUND: f64 = 10.0;

pub(crate) enum LpOutcome {
    Solved(Vec<f64>),
    Infeasible,
    Failed(String),
}

/// Feasibility LP with parameters in `[-B, B]`, minimizing the total slack
/// of the normalized `V̇` rows. Tight rows keep coefficients small, so terms
/// the certificate does not need tend to stay at zero.
pub(crate) fn solve_rows(set: &ConstraintSet, extra: &ConstraintSet) -> LpOutcome {
    let k = set.params.len();
    let mut normalized: Vec<(Vec<f64>, ComparisonOp, f64, bool)> = Vec::new();
    for row in set.rows.iter().chain(&extra.rows) {
        if row.coeffs.iter().all(Zero::is_zero) {
            if !row.kind.holds(&Zero::zero(), &row.rhs) {
                return LpOutcome::Infeasible;
            }
            continue;
        }
        let coeffs: Vec<f64> = row.coeffs.iter().map(to_f64).collect();
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if !scale.is_finite() || scale == 0.0 {
            return LpOutcome::Failed("row coefficients overflow f64".into());
        }
        let op = match row.kind {
            RowKind::Ge | RowKind::Gt => ComparisonOp::Ge,
            RowKind::Le | RowKind::Lt => ComparisonOp::Le,
        };
        normalized.push((coeffs.iter().map(|c| c / scale).collect(), op, to_f64(&row.rhs) / scale, row.on_lie));
    }

    let mut objective = vec![0.0; k];
    for (coeffs, _, _, on_lie) in &normalized {
        if *on_lie {
            for (o, c) in objective.iter_mut().zip(coeffs) {
                *o -= c;
            }
        }
    }
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = objective.iter().map(|&o| problem.add_var(o, (-COEFF_BOUND, COEFF_BOUND))).collect();
    for (coeffs, op, rhs, _) in &normalized {
        let expr: Vec<_> = vars.iter().copied().zip(coeffs.iter().copied()).filter(|(_, c)| *c != 0.0).collect();
        problem.add_constraint(expr, *op, *rhs);
    }
    match problem.solve() {
        Ok(outcome) => match outcome.solution() {
            Some(sol) => LpOutcome::Solved(vars.iter().map(|&v| sol.var_value(v)).collect()),
            None => LpOutcome::Failed("LP solve interrupted".into()),
        },
        Err(microlp::Error::Infeasible) => LpOutcome::Infeasible,
        Err(e) => LpOutcome::Failed(e.to_string()),
    }
}
