//! Chain conditions for the invariance principle.
//!
//! With `C^k = {x : L_f^k V(x) = 0}`, the condition `⋂_{k≤r} C^k = {0}`
//! rules out nonzero trajectories staying inside `{V̇ = 0}`. Two sufficient
//! encodings are provided:
//!
//! * single order: `(L_f V = 0 ∧ x ≠ 0) ⇒ L_f^r V ≠ 0`
//! * disjunctive:  `(L_f V = 0 ∧ x ≠ 0) ⇒ ∨_{2≤k≤r} L_f^k V ≠ 0`

use serde::Serialize;

use crate::lie::{LieChain, LieError};
use crate::poly::{Polynomial, VectorField};
use crate::smt::{nonzero_state, Formula, Rel};
use crate::verify::{Verdict, VerificationOutcome, Verifier, VerifyError};

/// Default highest Lie-derivative order tried by the scan.
pub const DEFAULT_R_MAX: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    SingleOrder,
    Disjunctive,
}

/// The claim and its negation, over the state variables of the chain.
#[derive(Clone, Debug)]
pub struct LaSalleEncoding {
    pub r: usize,
    pub variant: Variant,
    pub claim: Formula,
    pub violation: Formula,
}

/// Claim and violation given the derivatives `[L^1, …, L^r]` as polynomials
/// over `total` variables whose state block starts at `offset`.
pub fn lasalle_formula(derivs: &[Polynomial], offset: usize, n: usize, variant: Variant) -> (Formula, Formula) {
    assert!(derivs.len() >= 2, "the chain condition needs r >= 2");
    let total = derivs[0].nvars();
    let on_c1 = vec![Formula::atom(derivs[0].clone(), Rel::Eq), nonzero_state(offset, n, total)];
    let r = derivs.len();
    let orders: Vec<&Polynomial> = match variant {
        Variant::SingleOrder => vec![&derivs[r - 1]],
        Variant::Disjunctive => derivs[1..].iter().collect(),
    };
    let claim = Formula::implies(
        Formula::and(on_c1.clone()),
        Formula::or(orders.iter().map(|p| Formula::atom((*p).clone(), Rel::Ne)).collect()),
    );
    let mut violation = on_c1;
    violation.extend(orders.iter().map(|p| Formula::atom((*p).clone(), Rel::Eq)));
    (claim, Formula::and(violation))
}

pub fn build_lasalle(chain: &mut LieChain<Polynomial>, r: usize, variant: Variant) -> Result<LaSalleEncoding, LieError> {
    assert!(r >= 2, "the chain condition needs r >= 2");
    chain.extend_to(r)?;
    let n = chain.base().nvars();
    let (claim, violation) = lasalle_formula(&chain.derivatives()[..r], 0, n, variant);
    Ok(LaSalleEncoding { r, variant, claim, violation })
}

#[derive(Clone, Debug)]
pub struct LaSalleScan {
    /// First order whose condition was proved.
    pub r_used: Option<usize>,
    pub variant: Option<Variant>,
    pub outcomes: Vec<VerificationOutcome>,
}

/// Single-order conditions for `r = 2..=r_max`, then the disjunctive one at
/// `r_max`. Stops at the first success.
pub fn lasalle_scan(verifier: &Verifier, v: &Polynomial, f: &VectorField, r_max: usize) -> Result<LaSalleScan, VerifyError> {
    let mut chain = LieChain::new(v.clone(), f.clone())?;
    let mut outcomes = Vec::new();
    for r in 2..=r_max.max(2) {
        let out = verifier.check_lasalle_order(&mut chain, r, Variant::SingleOrder)?;
        let ok = out.verdict.is_valid();
        outcomes.push(out);
        if ok {
            return Ok(LaSalleScan { r_used: Some(r), variant: Some(Variant::SingleOrder), outcomes });
        }
    }
    let out = verifier.check_lasalle_order(&mut chain, r_max.max(2), Variant::Disjunctive)?;
    let ok = out.verdict.is_valid();
    outcomes.push(out);
    if ok {
        return Ok(LaSalleScan { r_used: Some(r_max.max(2)), variant: Some(Variant::Disjunctive), outcomes });
    }
    if outcomes.iter().all(|o| o.verdict == Verdict::Timeout) {
        if let Some(last) = outcomes.last_mut() {
            last.verdict = Verdict::Unknown { reason: "timeout at every order".into(), hint: None };
        }
    }
    Ok(LaSalleScan { r_used: None, variant: None, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{default_var_names, parse_polynomial};
    use crate::rational::int;

    fn p(text: &str) -> Polynomial {
        parse_polynomial(text, &default_var_names(2)).unwrap()
    }

    #[test]
    fn e8_order_two_has_axis_counterexamples() {
        let f = VectorField::new(vec![p("x2"), p("-x1^3 - x2^3")]).unwrap();
        let mut chain = LieChain::new(p("x1^4 + 2*x2^2"), f).unwrap();
        let enc = build_lasalle(&mut chain, 2, Variant::SingleOrder).unwrap();
        assert!(enc.violation.eval(&[int(3), int(0)]).unwrap());
        assert!(!enc.claim.eval(&[int(3), int(0)]).unwrap());
        let enc5 = build_lasalle(&mut chain, 5, Variant::SingleOrder).unwrap();
        assert!(!enc5.violation.eval(&[int(3), int(0)]).unwrap());
        let dis = build_lasalle(&mut chain, 5, Variant::Disjunctive).unwrap();
        assert!(dis.claim.eval(&[int(1), int(0)]).unwrap());
    }
}
