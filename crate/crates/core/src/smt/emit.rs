//! SMT-LIB v2 text generation. Output is byte-deterministic.

use std::fmt::Write;

use num_traits::{One, Signed};

use super::formula::{Formula, Rel};
use super::QuantifiedFormula;
use crate::poly::Polynomial;
use crate::rational::Rational;

fn literal(r: &Rational) -> String {
    let mag = r.abs();
    let body = if mag.denom().is_one() {
        format!("{}.0", mag.numer())
    } else {
        format!("(/ {}.0 {}.0)", mag.numer(), mag.denom())
    };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

/// Sum of monomials, powers written as repeated products.
pub fn emit_polynomial(p: &Polynomial, names: &[String]) -> String {
    let mut terms = Vec::new();
    for (m, c) in p.terms().rev() {
        let mut factors = Vec::new();
        if !c.is_one() || m.is_constant() {
            factors.push(literal(c));
        }
        for (i, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                factors.push(names[i].clone());
            }
        }
        terms.push(if factors.len() == 1 { factors.pop().expect("one factor") } else { format!("(* {})", factors.join(" ")) });
    }
    match terms.len() {
        0 => "0.0".to_string(),
        1 => terms.pop().expect("one term"),
        _ => format!("(+ {})", terms.join(" ")),
    }
}

fn emit_formula(f: &Formula, names: &[String], out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(a) => {
            let p = emit_polynomial(&a.poly, names);
            let _ = match a.rel {
                Rel::Lt => write!(out, "(< {p} 0.0)"),
                Rel::Le => write!(out, "(<= {p} 0.0)"),
                Rel::Eq => write!(out, "(= {p} 0.0)"),
                Rel::Ne => write!(out, "(not (= {p} 0.0))"),
                Rel::Ge => write!(out, "(>= {p} 0.0)"),
                Rel::Gt => write!(out, "(> {p} 0.0)"),
            };
        }
        Formula::Not(inner) => {
            out.push_str("(not ");
            emit_formula(inner, names, out);
            out.push(')');
        }
        Formula::And(parts) | Formula::Or(parts) => {
            out.push_str(if matches!(f, Formula::And(_)) { "(and" } else { "(or" });
            for p in parts {
                out.push(' ');
                emit_formula(p, names, out);
            }
            out.push(')');
        }
        Formula::Implies(a, b) => {
            out.push_str("(=> ");
            emit_formula(a, names, out);
            out.push(' ');
            emit_formula(b, names, out);
            out.push(')');
        }
    }
}

/// Full script: declarations, side assertions, the quantified assertion,
/// `check-sat` and `get-value` on the free constants.
pub fn emit(q: &QuantifiedFormula) -> String {
    let names = q.symbols();
    let mut out = String::from("(set-option :produce-models true)\n");
    for c in &q.constants {
        let _ = writeln!(out, "(declare-fun {c} () Real)");
    }
    for s in &q.side {
        out.push_str("(assert ");
        emit_formula(s, &names, &mut out);
        out.push_str(")\n");
    }
    out.push_str("(assert ");
    if q.universals.is_empty() {
        emit_formula(&q.matrix, &names, &mut out);
    } else {
        out.push_str("(forall (");
        let binders: Vec<String> = q.universals.iter().map(|x| format!("({x} Real)")).collect();
        out.push_str(&binders.join(" "));
        out.push_str(") ");
        emit_formula(&q.matrix, &names, &mut out);
        out.push(')');
    }
    out.push_str(")\n(check-sat)\n");
    if !q.constants.is_empty() {
        let _ = writeln!(out, "(get-value ({}))", q.constants.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::smt::formula::nonzero_state;
    use crate::smt::sexp::{parse_all, to_formula};

    fn names() -> Vec<String> {
        ["c1", "x1", "x2"].iter().map(|s| s.to_string()).collect()
    }

    fn e1_reduced() -> QuantifiedFormula {
        let n = names();
        let v = parse_polynomial("c1*x1^2 + c1*x2^2", &n).unwrap();
        let vdot = parse_polynomial("-2*c1*x1^4 - 2*c1*x2^4", &n).unwrap();
        let pending = parse_polynomial("-2*c1", &n).unwrap();
        QuantifiedFormula {
            constants: vec!["c1".into()],
            universals: vec!["x1".into(), "x2".into()],
            side: vec![Formula::atom(pending, Rel::Le)],
            matrix: Formula::implies(
                nonzero_state(1, 2, 3),
                Formula::and(vec![Formula::atom(v, Rel::Gt), Formula::atom(vdot, Rel::Lt)]),
            ),
        }
    }

    #[test]
    fn literals() {
        use crate::rational::ratio;
        assert_eq!(literal(&ratio(2, 1)), "2.0");
        assert_eq!(literal(&ratio(-1, 3)), "(- (/ 1.0 3.0))");
    }

    #[test]
    fn e1_script_shape() {
        let text = emit(&e1_reduced());
        assert!(text.contains("(declare-fun c1 () Real)"));
        assert!(text.contains("(assert (<= (* (- 2.0) c1) 0.0))"));
        assert!(text.contains("(forall ((x1 Real) (x2 Real)) (=> (> (+ (* x1 x1) (* x2 x2)) 0.0)"));
        assert!(text.contains("(< (+ (* (- 2.0) c1 x1 x1 x1 x1) (* (- 2.0) c1 x2 x2 x2 x2)) 0.0)"));
        assert!(text.ends_with("(check-sat)\n(get-value (c1))\n"));
        assert_eq!(text, emit(&e1_reduced()));
    }

    #[test]
    fn no_quantifier_without_universals() {
        let n = names();
        let q = QuantifiedFormula::counterexample_query(n.clone(), Formula::atom(parse_polynomial("x1 - 1", &n).unwrap(), Rel::Eq));
        let text = emit(&q);
        assert!(!text.contains("forall"));
        assert!(text.contains("(get-value (c1 x1 x2))"));
    }

    #[test]
    fn reparse_round_trip() {
        let q = e1_reduced();
        let text = emit(&q);
        let script = parse_all(&text).unwrap();
        let assertion = script.iter().rfind(|s| s.is_call("assert")).unwrap();
        let body = &assertion.as_list().unwrap()[1];
        assert!(body.is_call("forall"));
        let matrix = to_formula(&body.as_list().unwrap()[2], &q.symbols()).unwrap();
        let mut a: Vec<_> = matrix.atoms().into_iter().cloned().collect();
        let mut b: Vec<_> = q.matrix.atoms().into_iter().cloned().collect();
        a.sort_by_key(|x| x.poly.to_string());
        b.sort_by_key(|x| x.poly.to_string());
        assert_eq!(a, b);
    }
}
