//! Randomized laws for the polynomial substrate, templates and sample rows.
//! None of these need an SMT solver.

use std::collections::BTreeMap;

use lyra::lie::lie_derivative;
use lyra::poly::{default_var_names, parse_polynomial, MultiIndex, Polynomial, VectorField};
use lyra::rational::{int, ratio, Rational};
use lyra::synth::{build_sample_constraints, SampleSet};
use lyra::template::{apply_equalities, build_template, AffineForm, ParamId, Parity, TemplateSpec};
use num_traits::{One, Zero};
use proptest::prelude::*;

const N: usize = 3;

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

fn monomial(max_exp: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_exp, N).prop_map(MultiIndex::new)
}

fn poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((monomial(3), rational()), 0..6).prop_map(|terms| Polynomial::from_terms(N, terms))
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), N)
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n - k + i) / i)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn ring_laws(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &Polynomial::constant(N, Rational::one()), p.clone());
        prop_assert!((&p * &Polynomial::zero(N)).is_zero());
    }

    #[test]
    fn canonical_form_has_no_zero_coefficients(p in poly(), q in poly()) {
        for s in [&p * &q, &p - &q, &p + &q] {
            prop_assert!(s.terms().all(|(_, c)| !c.is_zero()));
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in poly(), q in poly(), x in point()) {
        let (px, qx) = (p.evaluate(&x).unwrap(), q.evaluate(&x).unwrap());
        prop_assert_eq!((&p + &q).evaluate(&x).unwrap(), &px + &qx);
        prop_assert_eq!((&p * &q).evaluate(&x).unwrap(), &px * &qx);
        prop_assert_eq!(p.scale(&int(3)).evaluate(&x).unwrap(), int(3) * &px);
    }

    #[test]
    fn gradient_product_rule(p in poly(), q in poly()) {
        let pq = &p * &q;
        for i in 0..N {
            let expected = &(&p.partial(i) * &q) + &(&p * &q.partial(i));
            prop_assert_eq!(pq.partial(i), expected);
        }
    }

    #[test]
    fn layers_reconstruct(p in poly()) {
        let top = p.highest_degree().unwrap_or(0);
        let sum = (0..=top).fold(Polynomial::zero(N), |acc, d| &acc + &p.homogeneous_layer(d));
        prop_assert_eq!(sum, p.clone());
        if !p.is_zero() {
            let low = p.lowest_layer();
            prop_assert!(low.terms().all(|(m, _)| Some(m.degree()) == p.lowest_degree()));
        }
    }

    #[test]
    fn render_parse_round_trip(p in poly()) {
        let names = default_var_names(N);
        prop_assert_eq!(parse_polynomial(&p.to_string(), &names).unwrap(), p);
    }

    /// Lie derivative is linear in `V`; in particular `L_f(sV) = s·L_f V`.
    #[test]
    fn lie_derivative_is_linear(v in poly(), w in poly(), f in prop::collection::vec(poly(), N), s in nonzero_rational()) {
        let f: Vec<Polynomial> = f.into_iter().map(|c| &c - &Polynomial::constant(N, c.constant_term())).collect();
        let f = VectorField::new(f).unwrap();
        let lv = lie_derivative(&v, &f).unwrap();
        prop_assert_eq!(lie_derivative(&(&v + &w), &f).unwrap(), &lv + &lie_derivative(&w, &f).unwrap());
        prop_assert_eq!(lie_derivative(&v.scale(&s), &f).unwrap(), lv.scale(&s));
    }

    #[test]
    fn template_monomial_count(nvars in 1usize..=4, lo in 1u32..=3, span in 0u32..=2) {
        let hi = lo + span;
        let full = TemplateSpec { nvars, min_degree: lo, max_degree: hi, parity: Parity::All, cross_terms: true };
        let expected: u64 = (lo..=hi).map(|d| binomial(d as u64 + nvars as u64 - 1, nvars as u64 - 1)).sum();
        prop_assert_eq!(full.monomials().len() as u64, expected);
        let pure = TemplateSpec { cross_terms: false, ..full.clone() };
        prop_assert_eq!(pure.monomials().len(), nvars * (hi - lo + 1) as usize);
        let even = TemplateSpec { parity: Parity::EvenOnly, ..full };
        prop_assert!(even.monomials().iter().all(|m| m.degree() % 2 == 0));
    }

    /// After elimination, any values of the free parameters extended through
    /// the substitution map satisfy every equality and give the same `V`.
    #[test]
    fn equalities_hold_after_elimination(
        rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 7), 1..4),
        free in prop::collection::vec(rational(), 7),
    ) {
        let spec = TemplateSpec { nvars: 2, min_degree: 2, max_degree: 3, parity: Parity::All, cross_terms: true };
        let v = build_template(&spec).unwrap();
        let eqs: Vec<AffineForm> = rows
            .iter()
            .map(|r| {
                let mut form = AffineForm::constant(Rational::zero());
                for (i, &k) in r.iter().enumerate() {
                    form.add_param(ParamId(i), int(k));
                }
                form
            })
            .collect();
        let Ok((reduced, solved)) = apply_equalities(&v, &eqs) else { return Ok(()) };
        let mut assignment: BTreeMap<ParamId, Rational> = BTreeMap::new();
        for id in reduced.params() {
            assignment.insert(id, free[id.0].clone());
        }
        for (id, form) in &solved {
            assignment.insert(*id, form.evaluate(&assignment).unwrap());
        }
        for i in 0..v.params().len() {
            assignment.entry(ParamId(i)).or_insert_with(Rational::zero);
        }
        for eq in &eqs {
            prop_assert!(eq.evaluate(&assignment).unwrap().is_zero());
        }
        prop_assert_eq!(reduced.substitute(&assignment).unwrap(), v.substitute(&assignment).unwrap());
    }

    /// Each sample row is affine in the parameters: evaluating at a convex
    /// combination gives the same combination of the endpoint values.
    #[test]
    fn sample_rows_are_affine(a in prop::collection::vec(rational(), 3), b in prop::collection::vec(rational(), 3), t in 0i64..=4) {
        let (f, v) = e1_and_quadratic();
        let mut samples = SampleSet::new();
        samples.push(vec![ratio(3, 2), int(-1)]);
        samples.push(vec![int(2), ratio(1, 3)]);
        let set = build_sample_constraints(&v, &f, &samples, &ratio(1, 100), true).unwrap();
        let t = ratio(t, 4);
        let mix: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| &t * x + (Rational::one() - &t) * y).collect();
        for row in &set.rows {
            let expected = &t * row.lhs(&a) + (Rational::one() - &t) * row.lhs(&b);
            prop_assert_eq!(row.lhs(&mix), expected);
        }
    }

    /// Strengthened rows have the form `lhs >= m` or `lhs <= -m` with
    /// `m >= 0`, so a feasible point stays feasible when scaled by `s >= 1`.
    #[test]
    fn strengthened_rows_survive_upscaling(c in prop::collection::vec(rational(), 3), s in 1i64..=50) {
        let (f, v) = e1_and_quadratic();
        let mut samples = SampleSet::new();
        for y in [[1, 1], [-2, 1], [3, -2], [1, 0]] {
            samples.push(y.iter().map(|&k| ratio(k, 2)).collect());
        }
        let set = build_sample_constraints(&v, &f, &samples, &ratio(1, 100), true).unwrap();
        let scaled: Vec<Rational> = c.iter().map(|x| x * int(s)).collect();
        for row in &set.rows {
            if row.holds(&c) {
                prop_assert!(row.holds(&scaled));
            }
        }
    }
}

fn e1_and_quadratic() -> (VectorField, lyra::template::ParamPoly) {
    let sys = lyra::system::corpus_system("e1").unwrap();
    let v = build_template(&TemplateSpec::default_for(2, 2)).unwrap();
    (sys.field, v)
}
