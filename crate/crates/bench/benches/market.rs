use std::hint::black_box;

use bookie_bench::draws;
use bookie_core::{
    expected_profit, kelly_bet, solve_optimal_prices, BeliefDistribution, Prices, SolveMethod,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn kelly(c: &mut Criterion) {
    let bettors = draws(&BeliefDistribution::reference_mixture(), 1024, 1);
    let prices = Prices::new(0.73, 0.68).unwrap();
    c.bench_function("kelly_bet/1024", |b| {
        b.iter(|| bettors.iter().map(|d| kelly_bet(d, &prices).stake).sum::<f64>())
    });
}

fn profit(c: &mut Criterion) {
    let mut group = c.benchmark_group("expected_profit");
    let prices = Prices::new(0.73, 0.68).unwrap();
    let laws = [
        ("two_block", BeliefDistribution::two_block(0.75, 0.25, 0.1).unwrap()),
        ("trunc_normal", BeliefDistribution::truncated_normal(0.4, 0.2).unwrap()),
        ("mixture", BeliefDistribution::reference_mixture()),
    ];
    for (name, dist) in &laws {
        group.bench_with_input(BenchmarkId::from_parameter(name), dist, |b, dist| {
            b.iter(|| expected_profit(dist, 0.5, black_box(&prices)))
        });
    }
    group.finish();
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_optimal_prices");
    group.sample_size(10);
    let two_block = BeliefDistribution::two_block(0.75, 0.25, 0.1).unwrap();
    let mixture = BeliefDistribution::reference_mixture();
    for (name, method) in [("grid", SolveMethod::GridThenPolish), ("foc", SolveMethod::FocRoots)] {
        group.bench_function(BenchmarkId::new("two_block", name), |b| {
            b.iter(|| solve_optimal_prices(&two_block, 0.5, method).unwrap())
        });
        group.bench_function(BenchmarkId::new("mixture", name), |b| {
            b.iter(|| solve_optimal_prices(&mixture, 0.5, method).unwrap())
        });
    }
    group.finish();
}

criterion_group!(market, kelly, profit, solver);
criterion_main!(market);
