use std::error::Error;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bookie_core::market::{foc_residuals, foc_roots, foc_roots_l};
use bookie_core::metrics::{read_trajectory_csv, StepRecord};
use bookie_core::sim::{solve_benchmark, Cadence, SweepFailure};
use bookie_core::{
    expected_profit, run_experiment, run_sweep, solve_optimal_prices, stochastic_regret, ExperimentConfig,
    Maximiser, SolveMethod,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

type CliResult<T> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "bookie-lab", version, about = "Bookmaker pricing experiments on binary events")]
struct Cli {
    /// Experiment config (TOML, or JSON when the name ends in .json).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run this seed instead of the config's seed list.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Grid,
    Foc,
}

#[derive(Subcommand)]
enum Command {
    /// Profit-maximising prices for the config's belief law.
    Solve {
        #[arg(long, value_enum, default_value_t = Method::Grid)]
        method: Method,
        /// Print every local maximiser, not just the global one.
        #[arg(long)]
        all: bool,
    },
    /// Run the config's experiment and print run summaries.
    Simulate {
        /// Settle bets against an event with this probability.
        #[arg(long, value_name = "P_TRUE")]
        resolve: Option<f64>,
        /// Write every step to the trajectory CSV.
        #[arg(long)]
        full: bool,
    },
    /// Run several configs in parallel (capped by BOOKIE_LAB_THREADS).
    Sweep {
        /// Further configs besides --config.
        configs: Vec<PathBuf>,
        #[arg(long, short = 'j')]
        jobs: Option<usize>,
    },
    /// Recompute stochastic regret from a stored trajectory CSV.
    Regret { trajectory: PathBuf },
    /// First-order-condition roots on each side, to check uniqueness.
    Roots {
        #[arg(long, default_value_t = 1e-3)]
        grid_step: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> CliResult<ExitCode> {
    match &cli.command {
        Command::Solve { method, all } => solve(cli, *method, *all),
        Command::Simulate { resolve, full } => simulate(cli, *resolve, *full),
        Command::Sweep { configs, jobs } => return sweep(cli, configs, *jobs),
        Command::Regret { trajectory } => regret(cli, trajectory),
        Command::Roots { grid_step } => roots(cli, *grid_step),
    }?;
    Ok(ExitCode::SUCCESS)
}

fn load_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let path = cli.config.as_deref().ok_or("--config is required for this command")?;
    Ok(ExperimentConfig::from_path(path)?)
}

/// Prints `text` and, with `--out`, also saves it as `<out>/<name>.<ext>`.
fn emit(cli: &Cli, name: &str, text: &str) -> CliResult<()> {
    print!("{text}");
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
        let ext = if cli.format == Format::Csv { "csv" } else { "json" };
        std::fs::write(dir.join(format!("{name}.{ext}")), text)?;
    }
    Ok(())
}

fn json_text(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("json values serialise") + "\n"
}

fn csv_text(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut text = format!("{header}\n");
    for row in rows {
        text += &row;
        text.push('\n');
    }
    text
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn solve(cli: &Cli, method: Method, all: bool) -> CliResult<()> {
    let cfg = load_config(cli)?;
    let dist = cfg.belief_distribution()?;
    let method = match method {
        Method::Grid => SolveMethod::GridThenPolish,
        Method::Foc => SolveMethod::FocRoots,
    };
    let mut found = solve_optimal_prices(&dist, cfg.g, method)?;
    if !all {
        found.truncate(1);
    }
    let residual = |m: &Maximiser| foc_residuals(&dist, cfg.g, &m.prices).ok();
    let text = match cli.format {
        Format::Json => {
            let items: Vec<Value> = found
                .iter()
                .map(|m| {
                    json!({
                        "a": m.prices.a(),
                        "b": m.prices.b(),
                        "profit": m.profit,
                        "is_global": m.is_global,
                        "foc_residual": residual(m).map(|(r, l)| vec![r, l]),
                    })
                })
                .collect();
            json_text(&if all { Value::Array(items) } else { items[0].clone() })
        }
        Format::Csv => csv_text(
            "a,b,profit,is_global,foc_residual_r,foc_residual_l",
            found.iter().map(|m| {
                let res = residual(m);
                format!(
                    "{},{},{},{},{},{}",
                    m.prices.a(),
                    m.prices.b(),
                    m.profit,
                    m.is_global,
                    opt(res.map(|r| r.0)),
                    opt(res.map(|r| r.1))
                )
            }),
        ),
    };
    emit(cli, "solve", &text)
}

fn simulate(cli: &Cli, resolve: Option<f64>, full: bool) -> CliResult<()> {
    let mut cfg = load_config(cli)?;
    if let Some(seed) = cli.seed {
        cfg.seeds = vec![seed];
    }
    if resolve.is_some() {
        cfg.resolve_p_true = resolve;
    }
    if full {
        cfg.cadence = Cadence::Full;
    }
    if let Some(dir) = &cli.out {
        cfg.output_dir = Some(dir.clone());
    }
    cfg.validate()?;
    let summaries = run_experiment(&cfg)?;
    let text = match cli.format {
        Format::Json => json_text(&serde_json::to_value(&summaries)?),
        Format::Csv => csv_text(
            "seed,replica,policy,horizon,final_a,final_b,regret_stochastic,regret_adversarial,\
             achieved_profit,clamp_count,cash_flow",
            summaries.iter().map(|s| {
                format!(
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    s.seed,
                    s.replica,
                    s.policy,
                    s.horizon,
                    s.final_a,
                    s.final_b,
                    s.regret_stochastic,
                    s.regret_adversarial,
                    s.achieved_profit,
                    s.clamp_count,
                    opt(s.resolution.map(|r| r.cash_flow))
                )
            }),
        ),
    };
    print!("{text}");
    Ok(())
}

fn sweep(cli: &Cli, extra: &[PathBuf], jobs: Option<usize>) -> CliResult<ExitCode> {
    let paths: Vec<&Path> =
        cli.config.iter().map(PathBuf::as_path).chain(extra.iter().map(PathBuf::as_path)).collect();
    if paths.is_empty() {
        return Err("sweep needs at least one config".into());
    }
    // Configs that fail to load are reported like failed runs.
    let mut failures = Vec::new();
    let mut loaded = Vec::new();
    let mut index_of = Vec::new();
    for (index, path) in paths.iter().enumerate() {
        match ExperimentConfig::from_path(path) {
            Ok(mut cfg) => {
                if let Some(seed) = cli.seed {
                    cfg.seeds = vec![seed];
                }
                loaded.push(cfg);
                index_of.push(index);
            }
            Err(err) => failures.push(SweepFailure { config_index: index, error: err.to_string() }),
        }
    }
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let csv_path = cli.out.as_ref().map(|dir| dir.join("sweep.csv"));
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
    }
    let mut report = run_sweep(&loaded, jobs, csv_path.as_deref())?;
    for row in &mut report.rows {
        row.config_index = index_of[row.config_index];
    }
    for agg in &mut report.aggregates {
        agg.config_index = index_of[agg.config_index];
    }
    for f in &mut report.failures {
        f.config_index = index_of[f.config_index];
    }
    report.failures.extend(failures);
    report.failures.sort_by_key(|f| f.config_index);

    let text = match cli.format {
        Format::Json => json_text(&json!({ "aggregates": report.aggregates, "failures": report.failures })),
        Format::Csv => csv_text(
            "config_index,config_hash,runs,regret_mean,regret_min,regret_max",
            report.aggregates.iter().map(|a| {
                format!(
                    "{},{},{},{},{},{}",
                    a.config_index, a.config_hash, a.runs, a.regret_mean, a.regret_min, a.regret_max
                )
            }),
        ),
    };
    print!("{text}");
    for f in &report.failures {
        eprintln!("config {} ({}) failed: {}", f.config_index, paths[f.config_index].display(), f.error);
    }
    Ok(if report.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn regret(cli: &Cli, trajectory: &Path) -> CliResult<()> {
    let cfg = load_config(cli)?;
    let dist = cfg.belief_distribution()?;
    let (header, rows) = read_trajectory_csv(File::open(trajectory)?)?;
    let last = rows.last().ok_or("trajectory has no rows")?;
    if header.config_hash != cfg.hash() {
        eprintln!("warning: trajectory was written by config {}, not {}", header.config_hash, cfg.hash());
    }
    let wealth_mean = cfg.wealth.mean();
    let bench = solve_benchmark(&cfg, &dist)?;
    let bench_step = expected_profit(&dist, cfg.g, &bench) * wealth_mean;

    let complete = rows.iter().enumerate().all(|(k, r)| r.t == k as u64 + 1);
    let (source, series): (&str, Vec<(u64, f64)>) = if complete {
        let records: Vec<StepRecord> = rows
            .iter()
            .map(|r| StepRecord {
                t: r.t,
                a: r.a,
                b: r.b,
                side: r.side,
                stake: r.stake,
                wealth: 0.0,
                belief: 0.0,
                p_hat: r.p_hat,
                step_profit: r.step_profit,
                payout: 0.0,
            })
            .collect();
        let regret = stochastic_regret(&records, &dist, cfg.g, wealth_mean, &bench);
        ("prices", rows.iter().map(|r| r.t).zip(regret).collect())
    } else {
        // Sampled rows lack the skipped steps' prices; use cumulative profit.
        let series = rows.iter().map(|r| (r.t, r.t as f64 * bench_step - r.cum_profit)).collect();
        ("cum_profit", series)
    };
    let text = match cli.format {
        Format::Json => {
            let (_, value) = *series.last().expect("rows are non-empty");
            json_text(&json!({
                "horizon": last.t,
                "rows": rows.len(),
                "source": source,
                "benchmark": { "a": bench.a(), "b": bench.b(), "step_profit": bench_step },
                "regret_stochastic": value,
                "stored_regret_stochastic": last.regret_stoch,
            }))
        }
        Format::Csv => csv_text("t,regret_stochastic", series.iter().map(|(t, r)| format!("{t},{r}"))),
    };
    emit(cli, "regret", &text)
}

fn roots(cli: &Cli, grid_step: f64) -> CliResult<()> {
    if !(grid_step > 0.0 && grid_step < 0.1) {
        return Err(format!("--grid-step {grid_step} must lie in (0, 0.1)").into());
    }
    let cfg = load_config(cli)?;
    let dist = cfg.belief_distribution()?;
    let r = foc_roots(&dist, cfg.g, grid_step);
    let l = foc_roots_l(&dist, cfg.g, grid_step);
    let text = match cli.format {
        Format::Json => json_text(&json!({
            "distribution": cfg.distribution.kind(),
            "g": cfg.g,
            "r": { "count": r.len(), "roots": r },
            "l": { "count": l.len(), "roots": l },
        })),
        Format::Csv => csv_text(
            "side,count,root",
            [("R", &r), ("L", &l)].into_iter().flat_map(|(side, roots)| {
                let n = roots.len();
                roots.iter().map(move |x| format!("{side},{n},{x}")).collect::<Vec<_>>()
            }),
        ),
    };
    emit(cli, "roots", &text)
}
