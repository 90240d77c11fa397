//! Strategies and independent numeric oracles shared by the property tests.
#![allow(dead_code)]

use bookie_core::BeliefDistribution;
use proptest::prelude::*;

/// Laws with a positive density on all of (0, 1).
pub fn full_support() -> impl Strategy<Value = BeliefDistribution> {
    prop_oneof![
        Just(BeliefDistribution::uniform(0.0, 1.0).unwrap()),
        (0.05..0.95f64, 0.05..0.6f64)
            .prop_map(|(mu, sigma)| BeliefDistribution::truncated_normal(mu, sigma).unwrap()),
        (0.2..8.0f64).prop_map(|l| BeliefDistribution::truncated_exponential(l).unwrap()),
        (0.05..0.95f64, -2.0..2.0f64, -2.0..2.0f64, 0.3..1.5f64, 0.3..1.5f64).prop_map(
            |(w, m1, m2, s1, s2)| {
                BeliefDistribution::sigmoid_gaussian_mixture(vec![w, 1.0 - w], vec![m1, m2], vec![s1, s2])
                    .unwrap()
            }
        ),
    ]
}

/// Continuous laws, including ones with gaps in their support.
pub fn continuous() -> impl Strategy<Value = BeliefDistribution> {
    prop_oneof![
        full_support(),
        (0.0..0.7f64, 0.05..0.3f64)
            .prop_map(|(lo, w)| BeliefDistribution::uniform(lo, (lo + w).min(1.0)).unwrap()),
        (0.51..0.99f64, 0.01..1.0f64, 0.01..1.0f64).prop_map(|(m, f1, f2)| {
            let cap = (m - 0.5).min(1.0 - m);
            BeliefDistribution::two_block(m, f1 * cap, f2 * cap).unwrap()
        }),
    ]
}

/// Every variant, atoms included.
pub fn any_law() -> impl Strategy<Value = BeliefDistribution> {
    prop_oneof![
        4 => continuous(),
        1 => (0.0..=1.0f64).prop_map(|p| BeliefDistribution::point_mass(p).unwrap()),
        1 => prop::collection::vec(0.0..=1.0f64, 1..40)
            .prop_map(|s| BeliefDistribution::empirical(s).unwrap()),
    ]
}

/// Golden-section maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Adaptive Simpson quadrature.
pub fn simpson(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (lo + hi);
    let (fa, fm, fb) = (f(lo), f(m), f(hi));
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, lo, hi, fa, fm, fb, whole, tol, 40)
}
