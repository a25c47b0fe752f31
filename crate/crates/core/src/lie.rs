//! Lie derivatives along a polynomial vector field.
//!
//! `L_f V = ∇V · f`, and `L_f^{k+1} V = ∇(L_f^k V) · f`. Works on concrete
//! polynomials and on parametric templates alike via [`Differentiable`].

use thiserror::Error;

use crate::poly::{Polynomial, VectorField};
use crate::template::{ParamPoly, TemplateError};

/// Default cap on the number of terms of any single derivative.
pub const DEFAULT_TERM_CAP: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("dimension mismatch: field has {field} variables, function has {function}")]
    DimensionMismatch { field: usize, function: usize },
    #[error("derivative of order {order} has {terms} terms, over the cap of {cap}")]
    TermCap { order: usize, terms: usize, cap: usize },
}

/// Anything that can be differentiated and multiplied by concrete polynomials.
pub trait Differentiable: Clone {
    fn nvars(&self) -> usize;
    fn num_terms(&self) -> usize;
    fn zero_like(&self) -> Self;
    fn partial(&self, i: usize) -> Self;
    fn mul_poly(&self, p: &Polynomial) -> Self;
    fn add_to(&self, other: &Self) -> Self;
}

impl Differentiable for Polynomial {
    fn nvars(&self) -> usize {
        Polynomial::nvars(self)
    }
    fn num_terms(&self) -> usize {
        Polynomial::num_terms(self)
    }
    fn zero_like(&self) -> Self {
        Polynomial::zero(self.nvars())
    }
    fn partial(&self, i: usize) -> Self {
        Polynomial::partial(self, i)
    }
    fn mul_poly(&self, p: &Polynomial) -> Self {
        self * p
    }
    fn add_to(&self, other: &Self) -> Self {
        self + other
    }
}

impl Differentiable for ParamPoly {
    fn nvars(&self) -> usize {
        ParamPoly::nvars(self)
    }
    fn num_terms(&self) -> usize {
        ParamPoly::num_terms(self)
    }
    fn zero_like(&self) -> Self {
        ParamPoly::zero(self.nvars())
    }
    fn partial(&self, i: usize) -> Self {
        ParamPoly::partial(self, i)
    }
    fn mul_poly(&self, p: &Polynomial) -> Self {
        // dimensions are checked by the caller
        ParamPoly::mul_poly(self, p).unwrap_or_else(|e: TemplateError| panic!("{e}"))
    }
    fn add_to(&self, other: &Self) -> Self {
        self.add(other).unwrap_or_else(|e| panic!("{e}"))
    }
}

/// `∇V · f`.
pub fn lie_derivative<T: Differentiable>(v: &T, f: &VectorField) -> Result<T, LieError> {
    if v.nvars() != f.nvars() {
        return Err(LieError::DimensionMismatch { field: f.nvars(), function: v.nvars() });
    }
    let mut acc = v.zero_like();
    for (i, fi) in f.components().iter().enumerate() {
        let d = v.partial(i);
        if d.num_terms() == 0 || fi.is_zero() {
            continue;
        }
        acc = acc.add_to(&d.mul_poly(fi));
    }
    Ok(acc)
}

/// Memoized chain `[L_f^1 V, …, L_f^r V]`.
#[derive(Clone, Debug)]
pub struct LieChain<T> {
    base: T,
    field: VectorField,
    derivatives: Vec<T>,
    cap: usize,
}

impl<T: Differentiable> LieChain<T> {
    pub fn new(base: T, field: VectorField) -> Result<Self, LieError> {
        Self::with_cap(base, field, DEFAULT_TERM_CAP)
    }

    pub fn with_cap(base: T, field: VectorField, cap: usize) -> Result<Self, LieError> {
        if base.nvars() != field.nvars() {
            return Err(LieError::DimensionMismatch { field: field.nvars(), function: base.nvars() });
        }
        Ok(LieChain { base, field, derivatives: Vec::new(), cap })
    }

    pub fn base(&self) -> &T {
        &self.base
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    /// Computed derivatives; entry `k - 1` is `L_f^k V`.
    pub fn derivatives(&self) -> &[T] {
        &self.derivatives
    }

    /// Extends the chain so that orders `1..=r` are available.
    pub fn extend_to(&mut self, r: usize) -> Result<(), LieError> {
        while self.derivatives.len() < r {
            let prev = self.derivatives.last().unwrap_or(&self.base);
            let next = lie_derivative(prev, &self.field)?;
            if next.num_terms() > self.cap {
                return Err(LieError::TermCap { order: self.derivatives.len() + 1, terms: next.num_terms(), cap: self.cap });
            }
            self.derivatives.push(next);
        }
        Ok(())
    }

    /// `L_f^k V`, with `k = 0` meaning `V` itself.
    pub fn order(&mut self, k: usize) -> Result<&T, LieError> {
        if k == 0 {
            return Ok(&self.base);
        }
        self.extend_to(k)?;
        Ok(&self.derivatives[k - 1])
    }
}

/// `[L_f^1 V, …, L_f^r V]`.
pub fn lie_chain<T: Differentiable>(v: &T, f: &VectorField, r: usize) -> Result<Vec<T>, LieError> {
    let mut chain = LieChain::new(v.clone(), f.clone())?;
    chain.extend_to(r)?;
    Ok(chain.derivatives)
}
