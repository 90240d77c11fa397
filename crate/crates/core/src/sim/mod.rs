//! Experiment driver: draws the bettor stream, runs a policy against it,
//! records the trajectory and writes CSV/JSON outputs.
//!
//! Every run is identified by `(seed, replica)`, where `replica` is the
//! seed's position in the config's seed list. Its random numbers come from
//! ChaCha12 seeded with `seed`: stream `2 · replica` draws bettors and stream
//! `2 · replica + 1` settles the event when resolution is requested. Streams
//! never overlap, so adding replicas never perturbs existing ones.

mod config;
mod sweep;

pub use config::{BenchmarkSpec, Cadence, ConfigError, ExperimentConfig, WealthEstimate, WealthSpec};
pub use sweep::{run_sweep, SweepAggregate, SweepFailure, SweepReport, SweepRow, THREADS_ENV};

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{BettorDraw, Side};
use crate::beliefs::BeliefDistribution;
use crate::market::{
    foc_residuals, solve_fair_optimal, solve_optimal_prices, MarketError, Prices, SolveMethod,
};
use crate::metrics::{
    adversarial_regret, is_checkpoint, stochastic_regret_from_profits, write_trajectory_csv, CsvHeader,
    MetricsError, ProfitCache, StepRecord, Trajectory, TrajectoryRow, SCHEMA_VERSION,
};
use crate::policies::{estimate_belief, BetObservation};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("benchmark solve failed: {0}")]
    Solver(#[from] MarketError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("summary json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Random streams for one replica.
pub fn replica_rngs(seed: u64, replica: u64) -> (ChaCha12Rng, ChaCha12Rng) {
    let mut bettors = ChaCha12Rng::seed_from_u64(seed);
    bettors.set_stream(2 * replica);
    let mut resolution = ChaCha12Rng::seed_from_u64(seed);
    resolution.set_stream(2 * replica + 1);
    (bettors, resolution)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Benchmark {
    pub a: f64,
    pub b: f64,
    /// Expected profit per step, `u(a, b) · E[w]`.
    pub step_profit: f64,
}

/// Realized settlement of all bets against one draw of the event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub p_true: f64,
    pub r_happened: bool,
    /// Stakes taken minus payouts owed, accumulated as the run went.
    pub cash_flow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub seed: u64,
    pub replica: u64,
    pub config_hash: String,
    pub policy: String,
    pub horizon: u64,
    pub final_a: f64,
    pub final_b: f64,
    pub regret_stochastic: f64,
    pub regret_adversarial: f64,
    pub benchmark: Benchmark,
    /// `Σ u(a_t, b_t) · E[w]`.
    pub achieved_profit: f64,
    /// First-order residuals at the final prices, when the tails are defined.
    pub foc_residual: Option<[f64; 2]>,
    pub bets_r: u64,
    pub bets_l: u64,
    pub no_bets: u64,
    pub clamp_count: u64,
    pub resolution: Option<Resolution>,
    /// Excluded from determinism comparisons.
    pub wall_time_secs: f64,
}

impl RunSummary {
    /// The summary with the wall-clock field zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        Self { wall_time_secs: 0.0, ..self.clone() }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub trajectory: Trajectory,
    /// Stochastic regret after every step.
    pub regret: Vec<f64>,
}

impl RunOutput {
    pub fn csv_rows(&self, cadence: Cadence) -> Vec<TrajectoryRow> {
        let horizon = self.summary.horizon;
        let mut cum = 0.0;
        let mut rows = Vec::new();
        for (rec, &regret) in self.trajectory.records.iter().zip(&self.regret) {
            cum += rec.step_profit;
            if cadence == Cadence::Full || is_checkpoint(rec.t, horizon) {
                rows.push(TrajectoryRow {
                    t: rec.t,
                    a: rec.a,
                    b: rec.b,
                    side: rec.side,
                    stake: rec.stake,
                    p_hat: rec.p_hat,
                    step_profit: rec.step_profit,
                    cum_profit: cum,
                    regret_stoch: regret,
                });
            }
        }
        rows
    }
}

/// Prices regret is measured against.
pub fn solve_benchmark(cfg: &ExperimentConfig, dist: &BeliefDistribution) -> Result<Prices, MarketError> {
    match cfg.benchmark {
        BenchmarkSpec::Global => {
            Ok(solve_optimal_prices(dist, cfg.g, SolveMethod::GridThenPolish)?[0].prices)
        }
        BenchmarkSpec::FairGlobal => Prices::fair(solve_fair_optimal(dist.mean(), cfg.g)),
        BenchmarkSpec::Custom { a, b } => Prices::new(a, b),
    }
}

/// Realized bookmaker cash flow recomputed from a trajectory.
pub fn realized_cash_flow(records: &[StepRecord], r_happened: bool) -> f64 {
    let winner = if r_happened { Side::ForR } else { Side::ForL };
    let mut cash = 0.0;
    for rec in records {
        cash += rec.stake;
        if rec.side == winner {
            cash -= rec.payout;
        }
    }
    cash
}

/// One replica, entirely in memory.
pub fn simulate(cfg: &ExperimentConfig, seed: u64, replica: u64) -> Result<RunOutput, SimError> {
    cfg.validate()?;
    let dist = cfg.belief_distribution()?;
    let benchmark = solve_benchmark(cfg, &dist)?;
    simulate_against(cfg, &dist, benchmark, seed, replica)
}

fn simulate_against(
    cfg: &ExperimentConfig,
    dist: &BeliefDistribution,
    benchmark: Prices,
    seed: u64,
    replica: u64,
) -> Result<RunOutput, SimError> {
    let started = Instant::now();
    let belief = cfg.bookmaker_belief()?;
    let wealth_mean = cfg.wealth.mean();
    let mut policy =
        cfg.policy.build(&belief, wealth_mean).map_err(|e| ConfigError::new("policy", e.to_string()))?;
    let (mut rng, mut resolve_rng) = replica_rngs(seed, replica);
    let mut cache = ProfitCache::new(dist, cfg.g);
    let bench_step = cache.profit(&benchmark) * wealth_mean;

    let mut trajectory = Trajectory { records: Vec::with_capacity(cfg.horizon as usize) };
    let (mut bets_r, mut bets_l) = (0u64, 0u64);
    // Bookmaker cash flow if R (index 0) or L (index 1) turns out to happen.
    let mut cash = [0.0f64; 2];
    for t in 1..=cfg.horizon {
        let prices = policy.quote();
        let p = dist.sample(&mut rng);
        let w = cfg.wealth.sample(&mut rng);
        let trade = policy.respond(&BettorDraw { belief: p, wealth: w });
        let wealth_estimate = match cfg.wealth_estimate {
            WealthEstimate::Oracle => wealth_mean,
            WealthEstimate::Disclosed => w,
        };
        let obs = BetObservation { side: trade.side, stake: trade.stake, wealth_estimate };
        let p_hat = estimate_belief(&prices, &obs).ok();
        policy.observe(&obs);
        match trade.side {
            Side::ForR => bets_r += 1,
            Side::ForL => bets_l += 1,
            Side::NoBet => {}
        }
        for (k, winner) in [Side::ForR, Side::ForL].into_iter().enumerate() {
            cash[k] += trade.stake;
            if trade.side == winner {
                cash[k] -= trade.payout;
            }
        }
        trajectory.push(StepRecord {
            t,
            a: prices.a(),
            b: prices.b(),
            side: trade.side,
            stake: trade.stake,
            wealth: w,
            belief: p,
            p_hat,
            step_profit: cache.profit(&prices) * wealth_mean,
            payout: trade.payout,
        });
    }

    let resolution = cfg.resolve_p_true.map(|p_true| {
        let r_happened = resolve_rng.random::<f64>() < p_true;
        Resolution { p_true, r_happened, cash_flow: cash[if r_happened { 0 } else { 1 }] }
    });

    let steps: Vec<f64> = trajectory.records.iter().map(|r| r.step_profit).collect();
    let regret = stochastic_regret_from_profits(&steps, bench_step);
    let final_prices = policy.quote();
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        seed,
        replica,
        config_hash: cfg.hash(),
        policy: policy.name().to_string(),
        horizon: cfg.horizon,
        final_a: final_prices.a(),
        final_b: final_prices.b(),
        regret_stochastic: regret.last().copied().unwrap_or(0.0),
        regret_adversarial: adversarial_regret(&trajectory.records, cfg.g),
        benchmark: Benchmark { a: benchmark.a(), b: benchmark.b(), step_profit: bench_step },
        achieved_profit: steps.iter().sum(),
        foc_residual: foc_residuals(dist, cfg.g, &final_prices).ok().map(|(r, l)| [r, l]),
        bets_r,
        bets_l,
        no_bets: cfg.horizon - bets_r - bets_l,
        clamp_count: policy.clamp_count(),
        resolution,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    Ok(RunOutput { summary, trajectory, regret })
}

/// File stem shared by a run's CSV and JSON outputs.
pub fn run_stem(summary: &RunSummary) -> String {
    format!("{}_seed{}_r{}", summary.policy, summary.seed, summary.replica)
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
pub fn write_run(dir: &Path, output: &RunOutput, cadence: Cadence) -> Result<PathBuf, SimError> {
    std::fs::create_dir_all(dir)?;
    let stem = run_stem(&output.summary);
    let header = CsvHeader {
        schema_version: SCHEMA_VERSION,
        seed: output.summary.seed,
        replica: output.summary.replica,
        config_hash: output.summary.config_hash.clone(),
    };
    let csv_path = dir.join(format!("{stem}.csv"));
    write_trajectory_csv(BufWriter::new(File::create(&csv_path)?), &header, output.csv_rows(cadence))?;
    let json = serde_json::to_string_pretty(&output.summary)?;
    std::fs::write(dir.join(format!("{stem}.json")), json + "\n")?;
    Ok(csv_path)
}

/// Runs every seed of `cfg` and writes outputs when `output_dir` is set.
/// The benchmark is solved once and shared across replicas.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunSummary>, SimError> {
    cfg.validate()?;
    let dist = cfg.belief_distribution()?;
    let benchmark = solve_benchmark(cfg, &dist)?;
    let mut summaries = Vec::with_capacity(cfg.seeds.len());
    for (replica, &seed) in cfg.seeds.iter().enumerate() {
        let output = simulate_against(cfg, &dist, benchmark, seed, replica as u64)?;
        if let Some(dir) = &cfg.output_dir {
            write_run(dir, &output, cfg.cadence)?;
        }
        summaries.push(output.summary);
    }
    Ok(summaries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beliefs::BeliefSpec;
    use crate::policies::PolicySpec;

    fn config(policy: PolicySpec) -> ExperimentConfig {
        ExperimentConfig {
            distribution: BeliefSpec::Uniform { lo: 0.0, hi: 1.0 },
            wealth: WealthSpec::default(),
            g: 0.5,
            g_minus: None,
            g_plus: None,
            policy,
            horizon: 2000,
            seeds: vec![11],
            benchmark: BenchmarkSpec::Global,
            wealth_estimate: WealthEstimate::Oracle,
            cadence: Cadence::Sampled,
            output_dir: None,
            resolve_p_true: Some(0.5),
        }
    }

    fn sa() -> PolicySpec {
        serde_json::from_str(r#"{"kind":"sa","params":{"a0":0.6,"b0":0.6}}"#).unwrap()
    }

    #[test]
    fn same_seed_same_run() {
        let cfg = config(sa());
        let x = simulate(&cfg, 11, 0).unwrap();
        let y = simulate(&cfg, 11, 0).unwrap();
        assert_eq!(x.trajectory, y.trajectory);
        assert_eq!(x.summary.without_timing(), y.summary.without_timing());
        let z = simulate(&cfg, 11, 1).unwrap();
        assert_ne!(x.trajectory.records[0].belief, z.trajectory.records[0].belief);
    }

    #[test]
    fn point_mass_at_g_is_silent() {
        let mut cfg = config(PolicySpec::Fixed { a: 0.5, b: 0.5 });
        cfg.distribution = BeliefSpec::PointMass { p: 0.5 };
        cfg.benchmark = BenchmarkSpec::FairGlobal;
        let out = simulate(&cfg, 1, 0).unwrap();
        assert_eq!(out.summary.no_bets, cfg.horizon);
        assert_eq!(out.summary.achieved_profit, 0.0);
        assert_eq!(out.summary.regret_stochastic, 0.0);
    }

    #[test]
    fn cash_flow_is_conserved() {
        let out = simulate(&config(sa()), 5, 0).unwrap();
        let res = out.summary.resolution.unwrap();
        let again = realized_cash_flow(&out.trajectory.records, res.r_happened);
        assert_eq!(res.cash_flow.to_bits(), again.to_bits());
    }

    #[test]
    fn sampled_rows_follow_cadence() {
        let out = simulate(&config(sa()), 5, 0).unwrap();
        let rows = out.csv_rows(Cadence::Sampled);
        assert_eq!(rows.len(), 1001);
        assert_eq!(rows.last().unwrap().t, 2000);
        assert_eq!(out.csv_rows(Cadence::Full).len(), 2000);
    }
}
