//! Incomplete numeric search for points violating a claim.
//!
//! Candidates are screened in `f64` and every hit is re-checked in exact
//! arithmetic, so a returned point is always a genuine violation. Finding
//! nothing proves nothing.

use rand::{Rng, RngExt};

use crate::rational::{from_f64_exact, Rational};
use crate::smt::Formula;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FalsifyConfig {
    /// Uniform samples in the box.
    pub samples: usize,
    /// Random directions probed at scales `±2^j`.
    pub rays: usize,
    pub halfwidth: f64,
    /// Exponent range for ray scaling, `j ∈ [-max_scale, max_scale]`.
    pub max_scale: i32,
    /// Upper bound on exact confirmations attempted.
    pub max_confirmations: usize,
}

impl Default for FalsifyConfig {
    fn default() -> Self {
        FalsifyConfig { samples: 10_000, rays: 200, halfwidth: 10.0, max_scale: 20, max_confirmations: 200 }
    }
}

/// Dyadic grid value so that points are short exact rationals.
fn quantize(v: f64) -> f64 {
    (v * 64.0).round() / 64.0
}

struct Search<'a> {
    violation: &'a Formula,
    confirmations: usize,
    limit: usize,
}

impl Search<'_> {
    fn try_point(&mut self, x: &[f64]) -> Option<Vec<Rational>> {
        if self.confirmations >= self.limit || x.iter().any(|v| !v.is_finite()) || !self.violation.eval_f64(x) {
            return None;
        }
        self.confirmations += 1;
        let exact: Vec<Rational> = x.iter().map(|&v| from_f64_exact(v).expect("finite")).collect();
        self.violation.eval(&exact).ok().filter(|&hit| hit).map(|_| exact)
    }

    fn scaled(&mut self, dir: &[f64], max_scale: i32) -> Option<Vec<Rational>> {
        for j in -max_scale..=max_scale {
            let lambda = 2f64.powi(j);
            for sign in [1.0, -1.0] {
                let x: Vec<f64> = dir.iter().map(|d| sign * lambda * d).collect();
                if let Some(hit) = self.try_point(&x) {
                    return Some(hit);
                }
            }
        }
        None
    }
}

/// Searches for `x ∈ ℝ^n` satisfying `violation` (a formula over `n` variables).
pub fn falsify_numeric<R: Rng>(violation: &Formula, n: usize, cfg: &FalsifyConfig, rng: &mut R) -> Option<Vec<Rational>> {
    let mut search = Search { violation, confirmations: 0, limit: cfg.max_confirmations };

    // sign patterns in {-1, 0, 1}^n along the scale ladder
    let full = 3usize.checked_pow(n as u32).filter(|&c| c <= 729);
    let patterns = full.unwrap_or(729);
    for idx in 0..patterns {
        let dir: Vec<f64> = match full {
            Some(_) => {
                let mut k = idx;
                (0..n)
                    .map(|_| {
                        let d = (k % 3) as f64 - 1.0;
                        k /= 3;
                        d
                    })
                    .collect()
            }
            None => (0..n).map(|_| rng.random_range(-1i32..=1) as f64).collect(),
        };
        if dir.iter().all(|&d| d == 0.0) {
            if let Some(hit) = search.try_point(&dir) {
                return Some(hit);
            }
            continue;
        }
        if let Some(hit) = search.scaled(&dir, cfg.max_scale) {
            return Some(hit);
        }
    }

    for _ in 0..cfg.rays {
        let dir: Vec<f64> = (0..n).map(|_| quantize(rng.random_range(-1.0..1.0))).collect();
        if let Some(hit) = search.scaled(&dir, cfg.max_scale) {
            return Some(hit);
        }
    }

    for k in 0..cfg.samples {
        let x: Vec<f64> = if k % 2 == 0 {
            (0..n).map(|_| quantize(rng.random_range(-cfg.halfwidth..cfg.halfwidth))).collect()
        } else {
            // independent scales per coordinate
            (0..n)
                .map(|_| {
                    let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    s * quantize(rng.random_range(0.5..1.0)) * 2f64.powi(rng.random_range(-cfg.max_scale..=cfg.max_scale))
                })
                .collect()
        };
        if let Some(hit) = search.try_point(&x) {
            return Some(hit);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{default_var_names, parse_polynomial};
    use crate::smt::Rel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn positive(text: &str) -> Formula {
        Formula::atom(parse_polynomial(text, &default_var_names(2)).unwrap(), Rel::Gt)
    }

    #[test]
    fn finds_claim_one_violation() {
        // V̇ of the E1 template at (c0, c1, c2) = (1, 101/100, 0)
        let f = positive("-2*x1^4 - 202/100*x2^4 - 2/100*x1^6*x2");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let hit = falsify_numeric(&f, 2, &FalsifyConfig::default(), &mut rng).expect("violation");
        assert!(f.eval(&hit).unwrap());
    }

    #[test]
    fn respects_known_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(falsify_numeric(&positive("-x1^4 - x2^4"), 2, &FalsifyConfig::default(), &mut rng).is_none());
        let hit = falsify_numeric(&positive("x1^2 - x2^2"), 2, &FalsifyConfig::default(), &mut rng).unwrap();
        assert!(positive("x1^2 - x2^2").eval(&hit).unwrap());
    }
}
