//! Sample sets and the linear constraints they induce on template parameters.

use std::collections::HashSet;

use num_traits::Zero;
use rand::{Rng, RngExt};

use crate::lie::{lie_derivative, LieError};
use crate::poly::VectorField;
use crate::rational::{sqrt_upper, to_f64, Rational};
use crate::template::{AffineForm, ParamId, ParamPoly};

/// Nonzero sample points without duplicates.
#[derive(Clone, Debug, Default)]
pub struct SampleSet {
    points: Vec<Vec<Rational>>,
    seen: HashSet<Vec<Rational>>,
}

impl SampleSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `y` unless it is the origin or already present.
    pub fn push(&mut self, y: Vec<Rational>) -> bool {
        if y.iter().all(Zero::is_zero) || self.seen.contains(&y) {
            return false;
        }
        self.seen.insert(y.clone());
        self.points.push(y);
        true
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Adds `count` points uniform on the grid `(1/64)ℤ^n ∩ [-h, h]^n`.
    pub fn draw_uniform<R: Rng>(&mut self, n: usize, count: usize, halfwidth: &Rational, rng: &mut R) {
        let steps = (to_f64(halfwidth) * 64.0).floor().max(1.0) as i64;
        let mut added = 0;
        let mut attempts = 0;
        while added < count && attempts < count * 10 {
            attempts += 1;
            let y: Vec<Rational> = (0..n)
                .map(|_| Rational::new(rng.random_range(-steps..=steps).into(), 64.into()))
                .collect();
            if self.push(y) {
                added += 1;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Gt,
    Ge,
    Lt,
    Le,
}

impl RowKind {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            RowKind::Gt => lhs > rhs,
            RowKind::Ge => lhs >= rhs,
            RowKind::Lt => lhs < rhs,
            RowKind::Le => lhs <= rhs,
        }
    }
}

/// `Σ coeffs[i]·c_{params[i]}  kind  rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRow {
    pub coeffs: Vec<Rational>,
    pub kind: RowKind,
    pub rhs: Rational,
    /// Whether the row constrains `V̇` (as opposed to `V`).
    pub on_lie: bool,
}

impl LinearRow {
    pub fn lhs(&self, values: &[Rational]) -> Rational {
        self.coeffs.iter().zip(values).map(|(a, b)| a * b).sum()
    }

    pub fn holds(&self, values: &[Rational]) -> bool {
        self.kind.holds(&self.lhs(values), &self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSet {
    pub params: Vec<ParamId>,
    pub rows: Vec<LinearRow>,
}

/// `|y|^d`, exact for even `d`, rounded up otherwise.
fn norm_pow(y: &[Rational], d: u32) -> Rational {
    let sq: Rational = y.iter().map(|v| v * v).sum();
    if d.is_multiple_of(2) {
        num_traits::pow(sq, (d / 2) as usize)
    } else {
        num_traits::pow(sqrt_upper(&sq), d as usize)
    }
}

/// `min(|y|^l, |y|^k)` for the lowest and highest degrees of `p`.
fn margin(p: &ParamPoly, y: &[Rational]) -> Rational {
    match (p.lowest_degree(), p.highest_degree()) {
        (Some(l), Some(k)) => {
            let (a, b) = (norm_pow(y, l), norm_pow(y, k));
            if a < b {
                a
            } else {
                b
            }
        }
        _ => Rational::zero(),
    }
}

fn row(form: &AffineForm, params: &[ParamId], kind: RowKind, bound: Rational, on_lie: bool) -> LinearRow {
    LinearRow {
        coeffs: params.iter().map(|&id| form.coeff(id)).collect(),
        kind,
        rhs: bound - form.constant_part(),
        on_lie,
    }
}

/// Rows `V(y) ≥ μ_V·m_V(y)` and `V̇(y) ≤ −μ_V̇·m_V̇(y)` for each sample; with
/// both margins `None` the strict forms `V(y) > 0`, `V̇(y) < 0` are produced.
pub(crate) fn rows_with_margins(
    v: &ParamPoly,
    vdot: &ParamPoly,
    params: &[ParamId],
    samples: &[Vec<Rational>],
    mu_v: Option<&Rational>,
    mu_vdot: Option<&Rational>,
) -> ConstraintSet {
    let mut rows = Vec::with_capacity(2 * samples.len());
    for y in samples {
        let at_v = v.evaluate_at(y).expect("sample dimension matches the template");
        let at_vdot = vdot.evaluate_at(y).expect("sample dimension matches the template");
        rows.push(match mu_v {
            Some(mu) => row(&at_v, params, RowKind::Ge, mu * margin(v, y), false),
            None => row(&at_v, params, RowKind::Gt, Rational::zero(), false),
        });
        rows.push(match mu_vdot {
            Some(mu) => row(&at_vdot, params, RowKind::Le, -(mu * margin(vdot, y)), true),
            None => row(&at_vdot, params, RowKind::Lt, Rational::zero(), true),
        });
    }
    ConstraintSet { params: params.to_vec(), rows }
}

/// Two affine constraints per sample on the parameters of `v`. The
/// strengthened form uses margins `μ·min(|y|^l, |y|^k)` with the lowest and
/// highest degrees of `V` and `V̇` respectively.
pub fn build_sample_constraints(
    v: &ParamPoly,
    f: &VectorField,
    samples: &SampleSet,
    mu: &Rational,
    strengthened: bool,
) -> Result<ConstraintSet, LieError> {
    let vdot = lie_derivative(v, f)?;
    let params = v.params();
    let margin = strengthened.then_some(mu);
    Ok(rows_with_margins(v, &vdot, &params, samples.points(), margin, margin))
}
