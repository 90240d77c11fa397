use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_experiment, ExperimentConfig, RunSummary, SimError};

/// Environment variable capping the number of sweep worker threads.
pub const THREADS_ENV: &str = "BOOKIE_LAB_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub config_index: usize,
    pub config_hash: String,
    pub distribution: String,
    pub policy: String,
    pub seed: u64,
    pub replica: u64,
    pub benchmark_a: f64,
    pub benchmark_b: f64,
    pub benchmark_step_profit: f64,
    pub final_a: f64,
    pub final_b: f64,
    pub regret_stochastic: f64,
    pub regret_adversarial: f64,
}

impl SweepRow {
    fn new(config_index: usize, cfg: &ExperimentConfig, s: &RunSummary) -> Self {
        Self {
            config_index,
            config_hash: s.config_hash.clone(),
            distribution: cfg.distribution.kind().to_string(),
            policy: s.policy.clone(),
            seed: s.seed,
            replica: s.replica,
            benchmark_a: s.benchmark.a,
            benchmark_b: s.benchmark.b,
            benchmark_step_profit: s.benchmark.step_profit,
            final_a: s.final_a,
            final_b: s.final_b,
            regret_stochastic: s.regret_stochastic,
            regret_adversarial: s.regret_adversarial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAggregate {
    pub config_index: usize,
    pub config_hash: String,
    pub runs: usize,
    pub regret_mean: f64,
    pub regret_min: f64,
    pub regret_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub config_index: usize,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<SweepAggregate>,
    pub failures: Vec<SweepFailure>,
}

impl SweepReport {
    /// One line per run, ordered by config then replica.
    pub fn write_csv(&self, path: &Path) -> Result<(), SimError> {
        let mut writer = csv::Writer::from_path(path).map_err(crate::metrics::MetricsError::from)?;
        for row in &self.rows {
            writer.serialize(row).map_err(crate::metrics::MetricsError::from)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn thread_cap(parallelism: usize) -> usize {
    let env_cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    let requested = parallelism.max(1);
    env_cap.map_or(requested, |cap| requested.min(cap.max(1)))
}

/// Runs every config, each with all of its seeds, on at most `parallelism`
/// threads (further capped by `BOOKIE_LAB_THREADS`). A failing config is
/// reported in `failures` and does not stop the others. When `summary_csv`
/// is given the per-run table is written there.
pub fn run_sweep(
    cfgs: &[ExperimentConfig],
    parallelism: usize,
    summary_csv: Option<&Path>,
) -> Result<SweepReport, SimError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap(parallelism))
        .build()
        .expect("thread pool builds");
    let results: Vec<Result<Vec<RunSummary>, SimError>> =
        pool.install(|| cfgs.par_iter().map(run_experiment).collect());

    let mut report = SweepReport::default();
    for (index, (cfg, result)) in cfgs.iter().zip(results).enumerate() {
        match result {
            Ok(summaries) => {
                let regrets: Vec<f64> = summaries.iter().map(|s| s.regret_stochastic).collect();
                report.aggregates.push(SweepAggregate {
                    config_index: index,
                    config_hash: cfg.hash(),
                    runs: regrets.len(),
                    regret_mean: regrets.iter().sum::<f64>() / regrets.len() as f64,
                    regret_min: regrets.iter().copied().fold(f64::INFINITY, f64::min),
                    regret_max: regrets.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                });
                report.rows.extend(summaries.iter().map(|s| SweepRow::new(index, cfg, s)));
            }
            Err(err) => report.failures.push(SweepFailure { config_index: index, error: err.to_string() }),
        }
    }
    if let Some(path) = summary_csv {
        report.write_csv(path)?;
    }
    Ok(report)
}
