mod common;

use bookie_core::market::{fair_profit_from_mean, foc_roots};
use bookie_core::*;
use common::{any_law, full_support, golden};
use proptest::prelude::*;

fn price_pair() -> impl Strategy<Value = (f64, f64)> {
    (0.01..0.99f64, 0.0..1.0f64).prop_map(|(a, t)| {
        let lo = (1.0 - a).max(0.01);
        (a, lo + t * (0.99 - lo))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn kelly_stake_maximises_log_wealth(p in 0.0..=1.0f64, w in 0.01..100.0f64, (a, b) in price_pair()) {
        let draw = BettorDraw::new(p, w).unwrap();
        let prices = Prices::new(a, b).unwrap();
        let bet = kelly_bet(&draw, &prices);
        let achieved = bettor_utility(&draw, &prices, bet.stake, bet.side).unwrap();
        let cap = w * (1.0 - 1e-12);
        for side in [Side::ForR, Side::ForL] {
            let (_, best) = golden(|s| bettor_utility(&draw, &prices, s, side).unwrap(), 0.0, cap);
            let best = best.max(w.ln());
            prop_assert!(best <= achieved + 1e-9 * achieved.abs().max(1.0),
                "{side:?}: golden {best} beats kelly {achieved} ({:?})", bet);
        }
    }

    #[test]
    fn stake_is_linear_in_wealth(p in 0.0..=1.0f64, w in 0.01..100.0f64, (a, b) in price_pair()) {
        let prices = Prices::new(a, b).unwrap();
        let one = kelly_bet(&BettorDraw::new(p, w).unwrap(), &prices);
        let two = kelly_bet(&BettorDraw::new(p, 2.0 * w).unwrap(), &prices);
        prop_assert_eq!(one.side, two.side);
        prop_assert_eq!(two.stake, 2.0 * one.stake);
    }

    #[test]
    fn stake_vanishes_at_the_dead_zone_edge((a, b) in price_pair(), eps in 1e-12..1e-6f64) {
        let prices = Prices::new(a, b).unwrap();
        let p = (a + eps).min(1.0);
        let r = kelly_bet(&BettorDraw::new(p, 1.0).unwrap(), &prices);
        prop_assert!(r.stake <= (p - a) / (1.0 - a) + 1e-15 && p - a < 2.0 * eps);
        let draw = BettorDraw::new((1.0 - b - eps).max(0.0), 1.0).unwrap();
        let l = kelly_bet(&draw, &prices);
        prop_assert!(l.stake <= (draw.complement() - b).max(0.0) / (1.0 - b) + 1e-15);
    }

    #[test]
    fn fair_diagonal_agrees_with_fair_profit(dist in any_law(), g in 0.01..0.99f64, a in 0.01..0.99f64) {
        let both = expected_profit(&dist, g, &Prices::fair(a).unwrap());
        prop_assert!((both - fair_profit(&dist, g, a)).abs() < 1e-10);
    }

    #[test]
    fn closed_form_fair_price_beats_the_grid(mean in 0.01..0.99f64, g in 0.01..0.99f64) {
        let best = fair_profit_from_mean(mean, g, solve_fair_optimal(mean, g));
        for k in 1..10_000 {
            let a = k as f64 / 10_000.0;
            prop_assert!(fair_profit_from_mean(mean, g, a) <= best + 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gradient_matches_central_differences(dist in full_support(), g in 0.05..0.95f64, (a, b) in price_pair()) {
        let (a, b) = (a.clamp(0.02, 0.98), b.clamp(0.02, 0.98));
        prop_assume!(a + b >= 1.0 + 2e-6);
        let u = |a: f64, b: f64| expected_profit(&dist, g, &Prices::new(a, b).unwrap());
        let h = 1e-6;
        let fd_a = (u(a + h, b) - u(a - h, b)) / (2.0 * h);
        let fd_b = (u(a, b + h) - u(a, b - h)) / (2.0 * h);
        let (da, db) = profit_gradient(&dist, g, &Prices::new(a, b).unwrap());
        prop_assert!((da - fd_a).abs() <= 1e-4 * fd_a.abs().max(1e-6), "{da} vs {fd_a}");
        prop_assert!((db - fd_b).abs() <= 1e-4 * fd_b.abs().max(1e-6), "{db} vs {fd_b}");
    }

    #[test]
    fn cvar_bound_is_below_profit(dist in full_support(), g in 0.05..0.95f64, s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let a = g.sqrt() + s * (0.999 - g.sqrt());
        let b = (1.0 - g).sqrt() + t * (0.999 - (1.0 - g).sqrt());
        let prices = Prices::new(a, b).unwrap();
        let bounds = profit_lower_bounds(&dist, &BookmakerBelief::new(g).unwrap(), &prices);
        let cvar = bounds.cvar_bound.unwrap();
        prop_assert!(cvar <= expected_profit(&dist, g, &prices) + 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn optimum_brackets_g_and_beats_the_deviation_bound(dist in full_support(), g in 0.1..0.9f64) {
        let best = solve_optimal_prices(&dist, g, SolveMethod::GridThenPolish).unwrap()[0];
        if best.prices.overround() > 1e-6 {
            prop_assert!(1.0 - best.prices.b() < g && g < best.prices.a(), "{:?}", best.prices);
        }
        prop_assert!(best.profit >= (g - dist.mean()).powi(2));
    }

    #[test]
    fn less_dispersed_crowd_pays_less(
        s1 in 0.05..0.5f64, ds in 0.05..0.5f64, g in 0.2..0.8f64,
    ) {
        let narrow = BeliefDistribution::truncated_normal(0.5, s1).unwrap();
        let wide = BeliefDistribution::truncated_normal(0.5, s1 + ds).unwrap();
        prop_assume!(sosd_compare(&narrow, &wide, 1e-3).unwrap() == Dominance::Dominates);
        for i in 1..30 {
            for j in 1..30 {
                let a = g + (1.0 - g) * i as f64 / 30.0;
                let b = (1.0 - g) + g * j as f64 / 30.0;
                let p = Prices::new(a, b).unwrap();
                prop_assert!(expected_profit(&narrow, g, &p) < expected_profit(&wide, g, &p));
            }
        }
        let u1 = solve_optimal_prices(&narrow, g, SolveMethod::GridThenPolish).unwrap()[0].profit;
        let u2 = solve_optimal_prices(&wide, g, SolveMethod::GridThenPolish).unwrap()[0].profit;
        prop_assert!(u1 < u2);
    }
}

#[test]
fn solver_methods_agree_on_the_suite() {
    let laws = [
        BeliefDistribution::uniform(0.0, 1.0).unwrap(),
        BeliefDistribution::two_block(0.75, 0.25, 0.1).unwrap(),
        BeliefDistribution::two_block(0.65, 0.15, 0.05).unwrap(),
        BeliefDistribution::truncated_normal(0.4, 0.2).unwrap(),
        BeliefDistribution::truncated_exponential(1.0).unwrap(),
        BeliefDistribution::truncated_exponential(5.0).unwrap(),
        BeliefDistribution::reference_mixture(),
    ];
    for dist in &laws {
        for g in [0.3, 0.5, 0.7] {
            let grid = solve_optimal_prices(dist, g, SolveMethod::GridThenPolish);
            let roots = solve_optimal_prices(dist, g, SolveMethod::FocRoots);
            // A side nobody bets on has no maximiser under either method.
            let (grid, roots) = match (grid, roots) {
                (Ok(x), Ok(y)) => (x[0], y[0]),
                (Err(x), Err(y)) => {
                    assert_eq!(x.to_string(), y.to_string());
                    continue;
                }
                other => panic!("{:?} g={g}: methods disagree {other:?}", dist.spec()),
            };
            let gap =
                (grid.prices.a() - roots.prices.a()).abs().max((grid.prices.b() - roots.prices.b()).abs());
            assert!(gap < 2e-3, "{:?} g={g}: {:?} vs {:?}", dist.spec(), grid.prices, roots.prices);
        }
    }
}

#[test]
fn uniform_has_one_root_at_the_square_root() {
    let uniform = BeliefDistribution::uniform(0.0, 1.0).unwrap();
    for g in [0.2, 0.5, 0.8] {
        let roots = foc_roots(&uniform, g, 1e-3);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - g.sqrt()).abs() < 1e-6, "g={g}: {roots:?}");
    }
}
