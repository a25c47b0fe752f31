//! Exact multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] is a sparse map from exponent vectors ([`MultiIndex`]) to
//! nonzero rational coefficients. The map is kept in graded lexicographic
//! order so that iteration, printing and layer extraction are deterministic.

mod parse;

pub use parse::{parse_polynomial, ParseError};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{fmt_rational, to_f64, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected} variables, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector field component {index} has a nonzero constant term")]
    NonzeroConstant { index: usize },
    #[error("vector field needs {expected} components, got {found}")]
    ComponentCount { expected: usize, found: usize },
}

/// Exponent vector `α = (α_1, …, α_n)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit index `e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn pure_power(n: usize, i: usize, d: u32) -> Self {
        let mut e = vec![0; n];
        e[i] = d;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `Some((i, d))` when the monomial is `x_i^d` with `d >= 1`.
    pub fn as_pure_power(&self) -> Option<(usize, u32)> {
        let mut found = None;
        for (i, &e) in self.0.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some((i, e));
            }
        }
        found
    }

    pub fn mul(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `α - e_i`, or `None` when `α_i = 0`.
    pub fn lower(&self, i: usize) -> Option<MultiIndex> {
        if self.0[i] == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some(MultiIndex(e))
    }

    /// Concatenates two exponent vectors (used to embed into a larger variable set).
    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut e = self.0.clone();
        e.extend_from_slice(&other.0);
        MultiIndex(e)
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::one();
        for (xi, &e) in x.iter().zip(&self.0) {
            if e > 0 {
                acc *= num_traits::pow(xi.clone(), e as usize);
            }
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }

    pub(crate) fn fmt_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        parts.join("*")
    }
}

/// Graded lexicographic order: total degree first, then larger exponents on
/// earlier variables win.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn default_var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Sparse polynomial in `n` variables with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zero(nvars), c)
    }

    /// The coordinate function `x_i` (zero-based `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(nvars, i), Rational::one())
    }

    pub fn monomial(index: MultiIndex, c: Rational) -> Self {
        let nvars = index.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(index, c);
        }
        Polynomial { nvars, terms }
    }

    /// Builds a polynomial from possibly repeated or zero terms.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "multi-index length does not match dimension");
            p.add_term(m, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Rational)> + Clone {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &MultiIndex) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&MultiIndex::zero(self.nvars))
    }

    /// Lowest total degree present, `None` for the zero polynomial.
    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).min()
    }

    /// Highest total degree present, `None` for the zero polynomial.
    pub fn highest_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    /// The degree-`d` homogeneous part.
    pub fn homogeneous_layer(&self, d: u32) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn lowest_layer(&self) -> Polynomial {
        match self.lowest_degree() {
            Some(l) => self.homogeneous_layer(l),
            None => self.clone(),
        }
    }

    pub fn highest_layer(&self) -> Polynomial {
        match self.highest_degree() {
            Some(k) => self.homogeneous_layer(k),
            None => self.clone(),
        }
    }

    fn check_dim(&self, other: usize) -> Result<(), PolyError> {
        if self.nvars != other {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, found: other });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other.nvars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other.nvars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other.nvars)?;
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Rational) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.nvars, Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact value at a rational point.
    pub fn evaluate(&self, x: &[Rational]) -> Result<Rational, PolyError> {
        self.check_dim(x.len())?;
        Ok(self.terms.iter().map(|(m, c)| c * m.eval(x)).sum())
    }

    /// Floating-point value, for screening and simulation only.
    pub fn evaluate_f64(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| to_f64(c) * m.eval_f64(x)).sum()
    }

    /// `∂p/∂x_i` by the power rule.
    pub fn partial(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            if let Some(lowered) = m.lower(i) {
                out.add_term(lowered, c * Rational::from_integer(m.get(i).into()));
            }
        }
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Substitutes `x_j ↦ 0` for every `j` in `vars`.
    pub fn restrict_zero(&self, vars: &[usize]) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().all(|&j| m.get(j) == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-embeds into `offset + nvars + trailing` variables, shifting indices by `offset`.
    pub fn embed(&self, offset: usize, total: usize) -> Polynomial {
        assert!(offset + self.nvars <= total);
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0; total];
            e[offset..offset + self.nvars].copy_from_slice(m.exponents());
            (MultiIndex(e), c.clone())
        });
        Polynomial::from_terms(total, terms)
    }

    /// Renders with the given variable names, highest graded-lex term first.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = m.fmt_with(names);
            if mono.is_empty() {
                out.push_str(&fmt_rational(&mag));
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&fmt_rational(&mag));
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }

    /// Largest absolute coefficient, zero for the zero polynomial.
    pub fn max_abs_coeff(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_var_names(self.nvars)))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial subtraction")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

/// `ẋ = f(x)` with polynomial components and `f(0) = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorField {
    nvars: usize,
    components: Vec<Polynomial>,
}

impl VectorField {
    pub fn new(components: Vec<Polynomial>) -> Result<Self, PolyError> {
        let nvars = components.len();
        for (i, c) in components.iter().enumerate() {
            if c.nvars() != nvars {
                return Err(PolyError::DimensionMismatch { expected: nvars, found: c.nvars() });
            }
            if !c.constant_term().is_zero() {
                return Err(PolyError::NonzeroConstant { index: i });
            }
        }
        Ok(VectorField { nvars, components })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn evaluate_f64(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.evaluate_f64(x)).collect()
    }

    pub fn evaluate(&self, x: &[Rational]) -> Result<Vec<Rational>, PolyError> {
        self.components.iter().map(|c| c.evaluate(x)).collect()
    }

    /// Jacobian at the origin, read off the degree-one terms.
    pub fn linearization(&self) -> Vec<Vec<Rational>> {
        self.components
            .iter()
            .map(|c| (0..self.nvars).map(|j| c.coeff(&MultiIndex::unit(self.nvars, j))).collect())
            .collect()
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            writeln!(f, "f{} = {}", i + 1, c)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn p(text: &str) -> Polynomial {
        parse_polynomial(text, &default_var_names(2)).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&p("x1 + x2") * &p("x1 - x2"), p("x1^2 - x2^2"));
    }

    #[test]
    fn product_with_zero_is_empty() {
        let z = &p("x1^3 + 2*x2") * &Polynomial::zero(2);
        assert!(z.is_zero());
        assert_eq!(z.num_terms(), 0);
        assert!(p("x1").scale(&int(0)).is_zero());
    }

    #[test]
    fn hand_expansion_of_scaled_product() {
        let got = &p("-x1^3 + x1^5*x2") * &p("2*x1");
        assert_eq!(got, p("-2*x1^4 + 2*x1^6*x2"));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = Polynomial::var(2, 0);
        let b = Polynomial::var(3, 0);
        assert!(matches!(a.checked_add(&b), Err(PolyError::DimensionMismatch { .. })));
        assert!(a.checked_mul(&b).is_err());
        assert!(a.evaluate(&[int(1)]).is_err());
    }

    #[test]
    fn layers() {
        let q = p("-2*x1^4 - 2*x2^4 + 2*x1^6*x2");
        assert_eq!(q.homogeneous_layer(7), p("2*x1^6*x2"));
        assert!(q.homogeneous_layer(5).is_zero());
        let h = p("x1^2 + x2^2");
        assert_eq!(h.homogeneous_layer(2), h);
        assert_eq!(q.lowest_layer(), p("-2*x1^4 - 2*x2^4"));
        assert_eq!(q.highest_layer(), p("2*x1^6*x2"));
        assert_eq!((q.lowest_degree(), q.highest_degree()), (Some(4), Some(7)));
    }

    #[test]
    fn evaluation() {
        assert_eq!(p("x1^2 + x2^2").evaluate(&[int(3), int(4)]).unwrap(), int(25));
        assert_eq!(p("-4*x2^4").evaluate(&[int(5), int(1)]).unwrap(), int(-4));
        assert_eq!(p("x1 + 3*x1*x2").evaluate(&[int(0), int(0)]).unwrap(), int(0));
        assert_eq!(p("1/2*x1").evaluate(&[ratio(2, 3), int(0)]).unwrap(), ratio(1, 3));
    }

    #[test]
    fn gradients() {
        assert_eq!(p("x1^4 + 2*x2^2").gradient(), vec![p("4*x1^3"), p("4*x2")]);
        assert!(Polynomial::constant(2, int(5)).gradient().iter().all(Polynomial::is_zero));
        assert_eq!(p("x1*x2").gradient(), vec![p("x2"), p("x1")]);
    }

    #[test]
    fn rendering_is_graded_lex_descending() {
        assert_eq!(p("-2*x2^4 - 2*x1^4").to_string(), "-2*x1^4 - 2*x2^4");
        assert_eq!(p("x2^2 + x1*x2 + x1^2").to_string(), "x1^2 + x1*x2 + x2^2");
        assert_eq!(p("197/100*x1^2 + 197/100*x2^2").to_string(), "197/100*x1^2 + 197/100*x2^2");
        assert_eq!(Polynomial::zero(2).to_string(), "0");
        assert_eq!(p("x1^7 - x1").to_string(), "x1^7 - x1");
    }

    #[test]
    fn graded_lex_order() {
        let a = MultiIndex::new(vec![2, 0]);
        let b = MultiIndex::new(vec![1, 1]);
        let c = MultiIndex::new(vec![0, 3]);
        assert!(a > b && c > a);
    }

    #[test]
    fn vector_field_rejects_constant_terms() {
        let f = VectorField::new(vec![p("x2"), p("1 - x1")]);
        assert!(matches!(f, Err(PolyError::NonzeroConstant { index: 1 })));
        let f = VectorField::new(vec![p("x2"), p("-x1")]).unwrap();
        assert_eq!(f.linearization(), vec![vec![int(0), int(1)], vec![int(-1), int(0)]]);
    }
}
