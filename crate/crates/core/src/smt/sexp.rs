//! Minimal S-expression reader for solver output and for re-reading our own scripts.

use std::fmt;

use num_traits::{One, Zero};

use crate::poly::Polynomial;
use crate::rational::{parse_rational, Rational};

use super::formula::{Formula, Rel};
use super::SmtError;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s) => Some(s),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(v) => Some(v),
            Sexp::Atom(_) => None,
        }
    }

    /// `(head ...)` when the head is the given symbol.
    pub fn is_call(&self, head: &str) -> bool {
        matches!(self.as_list().and_then(|l| l.first()).and_then(Sexp::as_atom), Some(h) if h == head)
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(s) => write!(f, "{s}"),
            Sexp::List(items) => {
                write!(f, "(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{it}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn bad(msg: impl Into<String>) -> SmtError {
    SmtError::Parse(msg.into())
}

/// Reads every top-level S-expression in `text`. `;` starts a comment.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SmtError> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' => {
                chars.next();
                stack.push(Vec::new());
            }
            ')' => {
                chars.next();
                let done = stack.pop().ok_or_else(|| bad("unbalanced `)`"))?;
                stack.last_mut().ok_or_else(|| bad("unbalanced `)`"))?.push(Sexp::List(done));
            }
            ';' => {
                while chars.next().is_some_and(|c| c != '\n') {}
            }
            '"' => {
                chars.next();
                let mut s = String::from("\"");
                for c in chars.by_ref() {
                    s.push(c);
                    if c == '"' {
                        break;
                    }
                }
                stack.last_mut().expect("stack nonempty").push(Sexp::Atom(s));
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                stack.last_mut().expect("stack nonempty").push(Sexp::Atom(s));
            }
        }
    }
    if stack.len() != 1 {
        return Err(bad("unbalanced `(`"));
    }
    Ok(stack.pop().expect("root"))
}

/// Exact value of a constant real term such as `2.0`, `(- 1.5)` or `(/ 1.0 3.0)`.
/// Algebraic `root-obj` values are rejected.
pub fn to_rational(e: &Sexp) -> Result<Rational, SmtError> {
    match e {
        Sexp::Atom(a) => parse_rational(a).ok_or_else(|| bad(format!("not a numeral: {a}"))),
        Sexp::List(items) => {
            let head = items.first().and_then(Sexp::as_atom).ok_or_else(|| bad(format!("bad term {e}")))?;
            let args = items[1..].iter().map(to_rational).collect::<Result<Vec<_>, _>>();
            match head {
                "root-obj" => Err(SmtError::Irrational(e.to_string())),
                "-" => {
                    let args = args?;
                    match args.as_slice() {
                        [a] => Ok(-a.clone()),
                        [a, rest @ ..] => Ok(rest.iter().fold(a.clone(), |acc, b| acc - b)),
                        [] => Err(bad("empty `-`")),
                    }
                }
                "+" => Ok(args?.into_iter().fold(Rational::zero(), |acc, b| acc + b)),
                "*" => Ok(args?.into_iter().fold(Rational::one(), |acc, b| acc * b)),
                "/" => {
                    let args = args?;
                    match args.as_slice() {
                        [a, b] if !b.is_zero() => Ok(a / b),
                        _ => Err(bad(format!("bad division {e}"))),
                    }
                }
                _ => Err(bad(format!("unsupported value {e}"))),
            }
        }
    }
}

/// Reads an arithmetic term over the named variables back into a polynomial.
pub fn to_polynomial(e: &Sexp, names: &[String]) -> Result<Polynomial, SmtError> {
    let n = names.len();
    match e {
        Sexp::Atom(a) => {
            if let Some(i) = names.iter().position(|v| v == a) {
                return Ok(Polynomial::var(n, i));
            }
            parse_rational(a)
                .map(|r| Polynomial::constant(n, r))
                .ok_or_else(|| bad(format!("unknown symbol {a}")))
        }
        Sexp::List(items) => {
            let head = items.first().and_then(Sexp::as_atom).ok_or_else(|| bad(format!("bad term {e}")))?;
            let args = items[1..].iter().map(|a| to_polynomial(a, names)).collect::<Result<Vec<_>, _>>()?;
            match head {
                "+" => Ok(args.iter().fold(Polynomial::zero(n), |acc, b| &acc + b)),
                "*" => Ok(args.iter().fold(Polynomial::constant(n, Rational::one()), |acc, b| &acc * b)),
                "-" => match args.as_slice() {
                    [a] => Ok(-a),
                    [a, rest @ ..] => Ok(rest.iter().fold(a.clone(), |acc, b| &acc - b)),
                    [] => Err(bad("empty `-`")),
                },
                "/" => {
                    let c = to_rational(e)?;
                    Ok(Polynomial::constant(n, c))
                }
                _ => Err(bad(format!("unsupported operator {head}"))),
            }
        }
    }
}

/// Reads a formula whose atoms have the shape `(rel term 0.0)`.
pub fn to_formula(e: &Sexp, names: &[String]) -> Result<Formula, SmtError> {
    match e {
        Sexp::Atom(a) if a == "true" => Ok(Formula::True),
        Sexp::Atom(a) if a == "false" => Ok(Formula::False),
        Sexp::List(items) => {
            let head = items.first().and_then(Sexp::as_atom).ok_or_else(|| bad(format!("bad formula {e}")))?;
            let rel = match head {
                "<" => Some(Rel::Lt),
                "<=" => Some(Rel::Le),
                "=" => Some(Rel::Eq),
                ">=" => Some(Rel::Ge),
                ">" => Some(Rel::Gt),
                _ => None,
            };
            if let Some(rel) = rel {
                let [_, lhs, rhs] = items.as_slice() else { return Err(bad(format!("bad atom {e}"))) };
                let p = &to_polynomial(lhs, names)? - &to_polynomial(rhs, names)?;
                return Ok(Formula::atom(p, rel));
            }
            let sub = || items[1..].iter().map(|a| to_formula(a, names)).collect::<Result<Vec<_>, _>>();
            match head {
                "and" => Ok(Formula::And(sub()?)),
                "or" => Ok(Formula::Or(sub()?)),
                "=>" => {
                    let mut parts = sub()?;
                    let b = parts.pop().ok_or_else(|| bad("empty implication"))?;
                    let a = parts.pop().ok_or_else(|| bad("empty implication"))?;
                    Ok(Formula::implies(a, b))
                }
                "not" => {
                    let mut parts = sub()?;
                    match (parts.pop(), parts.is_empty()) {
                        (Some(Formula::Atom(a)), true) if a.rel == Rel::Eq => Ok(Formula::atom(a.poly, Rel::Ne)),
                        (Some(inner), true) => Ok(Formula::negate(inner)),
                        _ => Err(bad(format!("bad negation {e}"))),
                    }
                }
                _ => Err(bad(format!("unsupported connective {head}"))),
            }
        }
        Sexp::Atom(a) => Err(bad(format!("unexpected atom {a}"))),
    }
}
