//! The external-solver boundary.
//!
//! Formulas are emitted as SMT-LIB v2 text over the reals, handed to a solver
//! subprocess (one process per query, killed at the deadline), and models are
//! read back as exact rationals.

mod emit;
pub mod formula;
pub mod sexp;
mod solver;

use std::collections::BTreeMap;

use rand::{Rng, RngExt};
use thiserror::Error;

pub use emit::{emit, emit_polynomial};
pub use formula::{nonzero_state, Atom, Formula, Rel};
pub use solver::{approximate_model, run_solver, SolverConfig, SolverOutcome};

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmtError {
    #[error("solver binary `{0}` not found or not executable")]
    SolverNotFound(String),
    #[error("solver i/o failure: {0}")]
    Io(String),
    #[error("unparseable solver output: {0}")]
    Parse(String),
    #[error("irrational model value: {0}")]
    Irrational(String),
}

pub type Model = BTreeMap<String, Rational>;

/// `∃ constants . side ∧ ∀ universals . matrix`.
///
/// Atom polynomials range over the constants followed by the universal
/// variables, in declaration order. Side assertions must not mention the
/// universal variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuantifiedFormula {
    pub constants: Vec<String>,
    pub universals: Vec<String>,
    pub side: Vec<Formula>,
    pub matrix: Formula,
}

impl QuantifiedFormula {
    /// Total number of symbols (constants then universals).
    pub fn arity(&self) -> usize {
        self.constants.len() + self.universals.len()
    }

    /// Validity of `∀x claim(x)` phrased as satisfiability of its negation,
    /// so that a model is a counterexample.
    pub fn counterexample_query(vars: Vec<String>, negation: Formula) -> Self {
        QuantifiedFormula { constants: vars, universals: Vec::new(), side: Vec::new(), matrix: negation }
    }

    pub fn symbols(&self) -> Vec<String> {
        self.constants.iter().chain(&self.universals).cloned().collect()
    }

    /// Model values for the constants, in declaration order.
    pub fn model_values(&self, model: &Model) -> Option<Vec<Rational>> {
        self.constants.iter().map(|c| model.get(c).cloned()).collect()
    }
}

/// Cheap sanity layer: substitutes the model and checks the side assertions
/// exactly and the matrix at `samples` random rational points.
pub fn model_spot_check<R: Rng>(q: &QuantifiedFormula, model: &Model, samples: usize, rng: &mut R) -> bool {
    let Some(values) = q.model_values(model) else { return false };
    let k = values.len();
    let n = q.universals.len();
    for s in &q.side {
        let mut point = values.clone();
        point.extend(std::iter::repeat_n(Rational::from_integer(0.into()), n));
        if !s.eval(&point).unwrap_or(false) {
            return false;
        }
    }
    let fixed = q.matrix.partially_evaluate(&values);
    let rounds = if n == 0 { 1 } else { samples };
    for _ in 0..rounds {
        let x: Vec<Rational> = (0..n)
            .map(|_| Rational::new(rng.random_range(-160i64..=160).into(), 16.into()))
            .collect();
        debug_assert_eq!(k + x.len(), q.arity());
        if !fixed.eval(&x).unwrap_or(false) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spot_check_rejects_bad_models() {
        let names: Vec<String> = ["c", "x"].iter().map(|s| s.to_string()).collect();
        let p = parse_polynomial("c*x^2", &names).unwrap();
        let q = QuantifiedFormula {
            constants: vec!["c".into()],
            universals: vec!["x".into()],
            side: vec![],
            matrix: Formula::atom(p, Rel::Ge),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let good: Model = [("c".to_string(), Rational::from_integer(2.into()))].into_iter().collect();
        let bad: Model = [("c".to_string(), Rational::from_integer((-1).into()))].into_iter().collect();
        assert!(model_spot_check(&q, &good, 100, &mut rng));
        assert!(!model_spot_check(&q, &bad, 100, &mut rng));
        assert!(!model_spot_check(&q, &Model::new(), 100, &mut rng));
    }
}
