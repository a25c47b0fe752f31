//! Parametric Lyapunov candidates `V(x) = Σ c_α x^α`.
//!
//! Coefficients of a [`ParamPoly`] are [`AffineForm`]s over template
//! parameters, so Lie derivatives of a template stay linear in the unknowns.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{default_var_names, MultiIndex, PolyError, Polynomial};
use crate::rational::{fmt_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TemplateError {
    #[error("template spec admits no monomials")]
    EmptyTemplate,
    #[error("invalid template spec: {0}")]
    InvalidSpec(String),
    #[error("no value given for parameter {0}")]
    MissingParameter(String),
    #[error("equality system is inconsistent ({0} = 0 has no solution)")]
    Inconsistent(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct ParamId(pub usize);

impl ParamId {
    pub fn name(self) -> String {
        format!("c{}", self.0)
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// A template unknown `c_α`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Param {
    pub id: ParamId,
    pub name: String,
}

impl Param {
    pub fn new(id: usize) -> Self {
        Param { id: ParamId(id), name: ParamId(id).name() }
    }
}

pub type Assignment = BTreeMap<ParamId, Rational>;

/// `Σ a_j c_j + b` with exact coefficients; zero entries are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct AffineForm {
    terms: BTreeMap<ParamId, Rational>,
    constant: Rational,
}

impl AffineForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        AffineForm { terms: BTreeMap::new(), constant: c }
    }

    pub fn param(id: ParamId) -> Self {
        Self::scaled_param(id, Rational::one())
    }

    pub fn scaled_param(id: ParamId, k: Rational) -> Self {
        let mut f = Self::zero();
        f.add_param(id, k);
        f
    }

    pub fn add_param(&mut self, id: ParamId, k: Rational) {
        if k.is_zero() {
            return;
        }
        let entry = self.terms.entry(id).or_insert_with(Rational::zero);
        *entry += k;
        if entry.is_zero() {
            self.terms.remove(&id);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamId, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, id: ParamId) -> Rational {
        self.terms.get(&id).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn params(&self) -> impl Iterator<Item = ParamId> + '_ {
        self.terms.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    /// True when no parameter appears.
    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &AffineForm) -> AffineForm {
        let mut out = self.clone();
        for (id, k) in &other.terms {
            out.add_param(*id, k.clone());
        }
        out.constant += &other.constant;
        out
    }

    pub fn sub(&self, other: &AffineForm) -> AffineForm {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> AffineForm {
        if k.is_zero() {
            return AffineForm::zero();
        }
        AffineForm {
            terms: self.terms.iter().map(|(id, c)| (*id, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    /// Replaces parameters by affine forms; parameters absent from `map` stay.
    pub fn substitute(&self, map: &BTreeMap<ParamId, AffineForm>) -> AffineForm {
        let mut out = AffineForm::constant(self.constant.clone());
        for (id, k) in &self.terms {
            match map.get(id) {
                Some(repl) => out = out.add(&repl.scale(k)),
                None => out.add_param(*id, k.clone()),
            }
        }
        out
    }

    pub fn evaluate(&self, assignment: &Assignment) -> Result<Rational, TemplateError> {
        let mut acc = self.constant.clone();
        for (id, k) in &self.terms {
            let v = assignment.get(id).ok_or_else(|| TemplateError::MissingParameter(id.name()))?;
            acc += k * v;
        }
        Ok(acc)
    }

    /// True when `self = k · other` for some nonzero rational `k`.
    pub fn is_multiple_of(&self, other: &AffineForm) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        let ratio = match other.terms.iter().next() {
            Some((id, k)) => self.coeff(*id) / k,
            None => &self.constant / &other.constant,
        };
        !ratio.is_zero() && other.scale(&ratio) == *self
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (id, k) in &self.terms {
            let mag = k.abs();
            let body = if mag.is_one() { id.name() } else { format!("{}*{}", fmt_rational(&mag), id) };
            parts.push((k.is_negative(), body));
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push((self.constant.is_negative(), fmt_rational(&self.constant.abs())));
        }
        for (i, (neg, body)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial in the state variables whose coefficients are affine forms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParamPoly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, AffineForm>,
}

impl ParamPoly {
    pub fn zero(nvars: usize) -> Self {
        ParamPoly { nvars, terms: BTreeMap::new() }
    }

    /// Lifts a concrete polynomial (constant coefficients).
    pub fn from_polynomial(p: &Polynomial) -> Self {
        let mut out = ParamPoly::zero(p.nvars());
        for (m, c) in p.terms() {
            out.add_term(m.clone(), AffineForm::constant(c.clone()));
        }
        out
    }

    pub fn add_term(&mut self, m: MultiIndex, form: AffineForm) {
        if form.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_default();
        *entry = entry.add(&form);
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &AffineForm)> + Clone {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &MultiIndex) -> AffineForm {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Parameters appearing in any coefficient, ascending.
    pub fn params(&self) -> Vec<ParamId> {
        let set: BTreeSet<ParamId> = self.terms.values().flat_map(|f| f.params()).collect();
        set.into_iter().collect()
    }

    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).min()
    }

    pub fn highest_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    pub fn homogeneous_layer(&self, d: u32) -> ParamPoly {
        ParamPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, f)| (m.clone(), f.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &ParamPoly) -> Result<ParamPoly, TemplateError> {
        if self.nvars != other.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, found: other.nvars }.into());
        }
        let mut out = self.clone();
        for (m, f) in &other.terms {
            out.add_term(m.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Rational) -> ParamPoly {
        let mut out = ParamPoly::zero(self.nvars);
        for (m, f) in &self.terms {
            out.add_term(m.clone(), f.scale(k));
        }
        out
    }

    /// Product with a concrete polynomial.
    pub fn mul_poly(&self, p: &Polynomial) -> Result<ParamPoly, TemplateError> {
        if self.nvars != p.nvars() {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, found: p.nvars() }.into());
        }
        let mut out = ParamPoly::zero(self.nvars);
        for (ma, fa) in &self.terms {
            for (mb, cb) in p.terms() {
                out.add_term(ma.mul(mb), fa.scale(cb));
            }
        }
        Ok(out)
    }

    pub fn partial(&self, i: usize) -> ParamPoly {
        let mut out = ParamPoly::zero(self.nvars);
        for (m, f) in &self.terms {
            if let Some(lowered) = m.lower(i) {
                out.add_term(lowered, f.scale(&Rational::from_integer(m.get(i).into())));
            }
        }
        out
    }

    /// Applies a parameter substitution map to every coefficient.
    pub fn substitute_params(&self, map: &BTreeMap<ParamId, AffineForm>) -> ParamPoly {
        let mut out = ParamPoly::zero(self.nvars);
        for (m, f) in &self.terms {
            out.add_term(m.clone(), f.substitute(map));
        }
        out
    }

    /// Concrete polynomial for a full parameter assignment.
    pub fn substitute(&self, assignment: &Assignment) -> Result<Polynomial, TemplateError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, f) in &self.terms {
            terms.push((m.clone(), f.evaluate(assignment)?));
        }
        Ok(Polynomial::from_terms(self.nvars, terms))
    }

    /// Value at a state point, as an affine form in the parameters.
    pub fn evaluate_at(&self, x: &[Rational]) -> Result<AffineForm, TemplateError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, found: x.len() }.into());
        }
        let mut acc = AffineForm::zero();
        for (m, f) in &self.terms {
            acc = acc.add(&f.scale(&m.eval(x)));
        }
        Ok(acc)
    }

    /// The polynomial multiplying each parameter, plus the parameter-free part.
    pub fn by_param(&self) -> (BTreeMap<ParamId, Polynomial>, Polynomial) {
        let mut per: BTreeMap<ParamId, Polynomial> = BTreeMap::new();
        let mut fixed = Polynomial::zero(self.nvars);
        for (m, f) in &self.terms {
            for (id, k) in f.terms() {
                per.entry(*id)
                    .or_insert_with(|| Polynomial::zero(self.nvars))
                    .add_term(m.clone(), k.clone());
            }
            fixed.add_term(m.clone(), f.constant_part().clone());
        }
        (per, fixed)
    }

    /// Joint polynomial in `(c_{ids[0]}, …, c_{ids[p-1]}, x_1, …, x_n)`.
    pub fn to_joint_polynomial(&self, ids: &[ParamId]) -> Polynomial {
        let np = ids.len();
        let total = np + self.nvars;
        let mut terms = Vec::new();
        for (m, f) in &self.terms {
            let shifted = MultiIndex::zero(np).concat(m);
            terms.push((shifted.clone(), f.constant_part().clone()));
            for (id, k) in f.terms() {
                let slot = ids.iter().position(|x| x == id).expect("parameter missing from symbol table");
                let mut e = shifted.exponents().to_vec();
                e[slot] += 1;
                terms.push((MultiIndex::new(e), k.clone()));
            }
        }
        Polynomial::from_terms(total, terms)
    }

    /// Renders grouped by parameter, e.g. `c1*(x1^2 + x2^2)`.
    pub fn display_grouped(&self) -> String {
        let names = default_var_names(self.nvars);
        let (per, fixed) = self.by_param();
        let mut parts: Vec<String> = Vec::new();
        for (id, p) in &per {
            if p.num_terms() == 1 {
                let (m, k) = p.terms().next().expect("one term");
                let mono = m.fmt_with(&names);
                let body = if mono.is_empty() { id.name() } else { format!("{id}*{mono}") };
                parts.push(if k.is_one() {
                    body
                } else if (-k).is_one() {
                    format!("-{body}")
                } else {
                    format!("{}*{body}", fmt_rational(k))
                });
            } else {
                parts.push(format!("{id}*({})", p.display_with(&names)));
            }
        }
        if !fixed.is_zero() {
            parts.push(fixed.display_with(&names));
        }
        if parts.is_empty() {
            return "0".to_string();
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for ParamPoly {
    /// Renders by monomial, e.g. `(2*c0 - 2*c1)*x1^6*x2 - 2*c0*x1^4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = default_var_names(self.nvars);
        for (i, (m, form)) in self.terms.iter().rev().enumerate() {
            let mono = m.fmt_with(&names);
            let single = form.terms.len() + usize::from(!form.constant.is_zero()) == 1;
            let (neg, coef) = if single {
                let (neg, mag) = match form.terms.iter().next() {
                    Some((id, k)) => (
                        k.is_negative(),
                        if k.abs().is_one() { id.name() } else { format!("{}*{}", fmt_rational(&k.abs()), id) },
                    ),
                    None => (form.constant.is_negative(), fmt_rational(&form.constant.abs())),
                };
                (neg, mag)
            } else {
                (false, format!("({form})"))
            };
            let sep = match (i, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            if mono.is_empty() {
                write!(f, "{sep}{coef}")?;
            } else {
                write!(f, "{sep}{coef}*{mono}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    EvenOnly,
    All,
}

/// Which monomials a template includes.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TemplateSpec {
    pub nvars: usize,
    pub min_degree: u32,
    pub max_degree: u32,
    pub parity: Parity,
    pub cross_terms: bool,
}

impl TemplateSpec {
    /// Even-degree monomials from 2 to `max_degree`; cross terms only for
    /// quadratic templates.
    pub fn default_for(nvars: usize, max_degree: u32) -> Self {
        TemplateSpec {
            nvars,
            min_degree: 2,
            max_degree,
            parity: Parity::EvenOnly,
            cross_terms: max_degree <= 2,
        }
    }

    pub fn validate(&self) -> Result<(), TemplateError> {
        if self.nvars == 0 {
            return Err(TemplateError::InvalidSpec("dimension must be positive".into()));
        }
        if self.min_degree < 1 || self.min_degree > self.max_degree {
            return Err(TemplateError::InvalidSpec(format!(
                "need 1 <= min_degree <= max_degree, got [{}, {}]",
                self.min_degree, self.max_degree
            )));
        }
        Ok(())
    }

    /// Admissible multi-indices in parameter order: by degree, pure powers
    /// first (by variable), then mixed monomials in descending graded-lex order.
    pub fn monomials(&self) -> Vec<MultiIndex> {
        let n = self.nvars;
        let mut out = Vec::new();
        for d in self.min_degree..=self.max_degree {
            if self.parity == Parity::EvenOnly && d % 2 == 1 {
                continue;
            }
            for i in 0..n {
                out.push(MultiIndex::pure_power(n, i, d));
            }
            if self.cross_terms && n > 1 {
                let mut mixed: Vec<MultiIndex> = exponent_vectors(n, d)
                    .into_iter()
                    .filter(|m| m.as_pure_power().is_none())
                    .collect();
                mixed.sort_by(|a, b| b.cmp(a));
                out.extend(mixed);
            }
        }
        out
    }
}

/// All exponent vectors of length `n` with total degree exactly `d`.
pub fn exponent_vectors(n: usize, d: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() == n - 1 {
            prefix.push(d);
            out.push(MultiIndex::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// One fresh parameter per admissible monomial.
pub fn build_template(spec: &TemplateSpec) -> Result<ParamPoly, TemplateError> {
    spec.validate()?;
    let monomials = spec.monomials();
    if monomials.is_empty() {
        return Err(TemplateError::EmptyTemplate);
    }
    let mut v = ParamPoly::zero(spec.nvars);
    for (id, m) in monomials.into_iter().enumerate() {
        v.add_term(m, AffineForm::param(ParamId(id)));
    }
    Ok(v)
}

/// Solves the equalities `form = 0` by Gaussian elimination and substitutes
/// the solved parameters into `v`.
///
/// Each equation eliminates the lowest-numbered parameter it still contains.
/// The returned map sends every eliminated parameter to an affine form over
/// the surviving ones.
pub fn apply_equalities(
    v: &ParamPoly,
    eqs: &[AffineForm],
) -> Result<(ParamPoly, BTreeMap<ParamId, AffineForm>), TemplateError> {
    let mut solved: BTreeMap<ParamId, AffineForm> = BTreeMap::new();
    for eq in eqs {
        let reduced = eq.substitute(&solved);
        let Some((&pivot, k)) = reduced.terms.iter().next() else {
            if reduced.constant.is_zero() {
                continue;
            }
            return Err(TemplateError::Inconsistent(eq.to_string()));
        };
        // pivot = -(rest)/k
        let mut rest = reduced.clone();
        rest.terms.remove(&pivot);
        let value = rest.scale(&(-Rational::one() / k));
        let single: BTreeMap<ParamId, AffineForm> = [(pivot, value.clone())].into_iter().collect();
        for existing in solved.values_mut() {
            *existing = existing.substitute(&single);
        }
        solved.insert(pivot, value);
    }
    Ok((v.substitute_params(&solved), solved))
}

pub fn fmt_substitutions(map: &BTreeMap<ParamId, AffineForm>) -> Vec<String> {
    map.iter().map(|(id, f)| format!("{id} -> {f}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use crate::rational::{int, ratio};

    fn quad2() -> ParamPoly {
        build_template(&TemplateSpec {
            nvars: 2,
            min_degree: 2,
            max_degree: 2,
            parity: Parity::All,
            cross_terms: true,
        })
        .unwrap()
    }

    fn c(i: usize) -> AffineForm {
        AffineForm::param(ParamId(i))
    }

    fn assign(vals: &[Rational]) -> Assignment {
        vals.iter().enumerate().map(|(i, v)| (ParamId(i), v.clone())).collect()
    }

    #[test]
    fn quadratic_template_matches_textbook_order() {
        let v = quad2();
        assert_eq!(v.to_string(), "c0*x1^2 + c2*x1*x2 + c1*x2^2");
        assert_eq!(v.coeff(&MultiIndex::new(vec![2, 0])), c(0));
        assert_eq!(v.coeff(&MultiIndex::new(vec![0, 2])), c(1));
        assert_eq!(v.coeff(&MultiIndex::new(vec![1, 1])), c(2));
    }

    #[test]
    fn one_dimensional_and_even_only_templates() {
        let spec = TemplateSpec { nvars: 1, min_degree: 2, max_degree: 2, parity: Parity::All, cross_terms: true };
        assert_eq!(build_template(&spec).unwrap().display_grouped(), "c0*x1^2");
        let spec = TemplateSpec { nvars: 2, min_degree: 2, max_degree: 4, parity: Parity::EvenOnly, cross_terms: false };
        let v = build_template(&spec).unwrap();
        assert_eq!(v.display_grouped(), "c0*x1^2 + c1*x2^2 + c2*x1^4 + c3*x2^4");
    }

    #[test]
    fn empty_and_invalid_specs() {
        let spec = TemplateSpec { nvars: 2, min_degree: 3, max_degree: 3, parity: Parity::EvenOnly, cross_terms: true };
        assert_eq!(build_template(&spec), Err(TemplateError::EmptyTemplate));
        let spec = TemplateSpec { nvars: 2, min_degree: 0, max_degree: 2, parity: Parity::All, cross_terms: true };
        assert!(matches!(build_template(&spec), Err(TemplateError::InvalidSpec(_))));
    }

    #[test]
    fn substitution() {
        let v = quad2();
        let names = crate::poly::default_var_names(2);
        let p = v.substitute(&assign(&[int(1), int(1), int(0)])).unwrap();
        assert_eq!(p, parse_polynomial("x1^2 + x2^2", &names).unwrap());
        assert!(v.substitute(&assign(&[int(0), int(0), int(0)])).unwrap().is_zero());
        let p = v.substitute(&assign(&[ratio(197, 100), ratio(197, 100), int(0)])).unwrap();
        assert_eq!(p.to_string(), "197/100*x1^2 + 197/100*x2^2");
        assert_eq!(
            v.substitute(&assign(&[int(1), int(1)])),
            Err(TemplateError::MissingParameter("c2".into()))
        );
    }

    #[test]
    fn equalities_reduce_to_single_parameter() {
        let v = quad2();
        let eqs = vec![c(2), c(0).scale(&int(2)).sub(&c(1).scale(&int(2)))];
        let (reduced, map) = apply_equalities(&v, &eqs).unwrap();
        assert_eq!(reduced.display_grouped(), "c1*(x1^2 + x2^2)");
        assert_eq!(fmt_substitutions(&map), vec!["c0 -> c1", "c2 -> 0"]);
    }

    #[test]
    fn empty_and_collapsing_systems() {
        let v = quad2();
        let (same, map) = apply_equalities(&v, &[]).unwrap();
        assert_eq!(same, v);
        assert!(map.is_empty());
        let eqs = vec![c(0).sub(&c(1)), c(1).sub(&c(2)), c(2)];
        let (zero, map) = apply_equalities(&v, &eqs).unwrap();
        assert!(zero.is_zero());
        assert!(map.values().all(AffineForm::is_zero));
        let bad = vec![c(0), c(0).add(&AffineForm::constant(int(1)))];
        assert!(matches!(apply_equalities(&v, &bad), Err(TemplateError::Inconsistent(_))));
    }

    #[test]
    fn affine_display_and_multiples() {
        let f = c(0).scale(&int(2)).sub(&c(1).scale(&int(2)));
        assert_eq!(f.to_string(), "2*c0 - 2*c1");
        assert_eq!(c(2).scale(&int(-1)).to_string(), "-c2");
        assert!(c(2).scale(&int(-1)).is_multiple_of(&c(2)));
        assert!(!f.is_multiple_of(&c(0)));
        assert_eq!(AffineForm::zero().to_string(), "0");
    }

    #[test]
    fn joint_polynomial_embedding() {
        let v = quad2();
        let ids = v.params();
        let joint = v.to_joint_polynomial(&ids);
        assert_eq!(joint.nvars(), 5);
        assert_eq!(joint.num_terms(), 3);
        let pt = [int(1), int(2), int(3), int(5), int(7)];
        let direct = v
            .substitute(&assign(&[int(1), int(2), int(3)]))
            .unwrap()
            .evaluate(&[int(5), int(7)])
            .unwrap();
        assert_eq!(joint.evaluate(&pt).unwrap(), direct);
    }
}
