//! Boolean combinations of polynomial sign atoms.

use num_traits::{Signed, Zero};

use crate::poly::{PolyError, Polynomial};
use crate::rational::Rational;

/// Relation of an atom `p ⋈ 0`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Rel {
    pub fn holds(self, v: &Rational) -> bool {
        match self {
            Rel::Lt => v.is_negative(),
            Rel::Le => !v.is_positive(),
            Rel::Eq => v.is_zero(),
            Rel::Ne => !v.is_zero(),
            Rel::Ge => !v.is_negative(),
            Rel::Gt => v.is_positive(),
        }
    }

    pub fn holds_f64(self, v: f64) -> bool {
        match self {
            Rel::Lt => v < 0.0,
            Rel::Le => v <= 0.0,
            Rel::Eq => v == 0.0,
            Rel::Ne => v != 0.0,
            Rel::Ge => v >= 0.0,
            Rel::Gt => v > 0.0,
        }
    }

    pub fn negate(self) -> Rel {
        match self {
            Rel::Lt => Rel::Ge,
            Rel::Le => Rel::Gt,
            Rel::Eq => Rel::Ne,
            Rel::Ne => Rel::Eq,
            Rel::Ge => Rel::Lt,
            Rel::Gt => Rel::Le,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Atom {
    pub poly: Polynomial,
    pub rel: Rel,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(poly: Polynomial, rel: Rel) -> Formula {
        Formula::Atom(Atom { poly, rel })
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::True,
            1 => parts.into_iter().next().expect("one part"),
            _ => Formula::And(parts),
        }
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::False,
            1 => parts.into_iter().next().expect("one part"),
            _ => Formula::Or(parts),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn negate(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    /// Negation pushed through connectives down to the atoms.
    pub fn negated(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(a) => Formula::atom(a.poly.clone(), a.rel.negate()),
            Formula::Not(inner) => (**inner).clone(),
            Formula::And(parts) => Formula::or(parts.iter().map(Formula::negated).collect()),
            Formula::Or(parts) => Formula::and(parts.iter().map(Formula::negated).collect()),
            Formula::Implies(a, b) => Formula::and(vec![(**a).clone(), b.negated()]),
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Result<bool, PolyError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => a.rel.holds(&a.poly.evaluate(x)?),
            Formula::Not(inner) => !inner.eval(x)?,
            Formula::And(parts) => {
                for p in parts {
                    if !p.eval(x)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(parts) => {
                for p in parts {
                    if p.eval(x)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !a.eval(x)? || b.eval(x)?,
        })
    }

    /// Floating-point evaluation, for cheap screening only.
    pub fn eval_f64(&self, x: &[f64]) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => a.rel.holds_f64(a.poly.evaluate_f64(x)),
            Formula::Not(inner) => !inner.eval_f64(x),
            Formula::And(parts) => parts.iter().all(|p| p.eval_f64(x)),
            Formula::Or(parts) => parts.iter().any(|p| p.eval_f64(x)),
            Formula::Implies(a, b) => !a.eval_f64(x) || b.eval_f64(x),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.push(a),
            Formula::Not(inner) => inner.collect_atoms(out),
            Formula::And(parts) | Formula::Or(parts) => parts.iter().for_each(|p| p.collect_atoms(out)),
            Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Fixes the leading `values.len()` variables, leaving a formula over the rest.
    pub fn partially_evaluate(&self, values: &[Rational]) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(a) => Formula::atom(fix_leading(&a.poly, values), a.rel),
            Formula::Not(inner) => Formula::negate(inner.partially_evaluate(values)),
            Formula::And(parts) => Formula::And(parts.iter().map(|p| p.partially_evaluate(values)).collect()),
            Formula::Or(parts) => Formula::Or(parts.iter().map(|p| p.partially_evaluate(values)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.partially_evaluate(values), b.partially_evaluate(values)),
        }
    }
}

/// Substitutes values for the first variables of `p`; the result lives in the remaining ones.
pub fn fix_leading(p: &Polynomial, values: &[Rational]) -> Polynomial {
    let k = values.len();
    let rest = p.nvars() - k;
    let terms = p.terms().map(|(m, c)| {
        let e = m.exponents();
        let head = crate::poly::MultiIndex::new(e[..k].to_vec()).eval(values);
        (crate::poly::MultiIndex::new(e[k..].to_vec()), c * head)
    });
    Polynomial::from_terms(rest, terms.collect::<Vec<_>>())
}

/// `Σ x_i^2 > 0`, i.e. `x ≠ 0`, over variables `offset..offset+n` of `total`.
pub fn nonzero_state(offset: usize, n: usize, total: usize) -> Formula {
    let mut sq = Polynomial::zero(total);
    for i in 0..n {
        let xi = Polynomial::var(total, offset + i);
        sq = &sq + &(&xi * &xi);
    }
    Formula::atom(sq, Rel::Gt)
}
