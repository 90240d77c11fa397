use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bookie-lab"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const UNIFORM_SA: &str = r#"
g = 0.5
horizon = 3000
seeds = [5]

[distribution]
kind = "uniform"
params = { lo = 0.0, hi = 1.0 }

[policy]
kind = "sa"
params = { a0 = 0.6, b0 = 0.6 }
"#;

#[test]
fn solve_two_block() {
    let cfg = configs().join("two_block.toml");
    let v = ok_json(&["--config", cfg.to_str().unwrap(), "solve"]);
    assert!((v["a"].as_f64().unwrap() - FRAC_1_SQRT_2).abs() < 1e-3);
    assert!((v["b"].as_f64().unwrap() - 0.63395).abs() < 1e-3);
    assert_eq!(v["is_global"], Value::Bool(true));
    assert_eq!(v["foc_residual"].as_array().unwrap().len(), 2);
}

#[test]
fn roots_on_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "u.toml", UNIFORM_SA);
    let v = ok_json(&["roots", "--config", cfg.to_str().unwrap()]);
    assert_eq!(v["r"]["count"], 1);
    assert!((v["r"]["roots"][0].as_f64().unwrap() - FRAC_1_SQRT_2).abs() < 1e-4);
}

#[test]
fn simulate_then_recompute_regret() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "u.toml", UNIFORM_SA);
    let cfg = cfg.to_str().unwrap();
    for (sub, full) in [("sampled", false), ("full", true)] {
        let out = dir.path().join(sub);
        let mut args = vec!["simulate", "--config", cfg, "--seed", "9", "--out", out.to_str().unwrap()];
        if full {
            args.push("--full");
        }
        let summaries = ok_json(&args);
        let stored = summaries[0]["regret_stochastic"].as_f64().unwrap();
        let csv = out.join("sa_seed9_r0.csv");
        assert!(out.join("sa_seed9_r0.json").exists());
        let v = ok_json(&["regret", csv.to_str().unwrap(), "--config", cfg]);
        let recomputed = v["regret_stochastic"].as_f64().unwrap();
        if full {
            assert_eq!(v["source"], "prices");
            assert_eq!(recomputed.to_bits(), stored.to_bits());
        } else {
            assert_eq!(v["source"], "cum_profit");
            assert!((recomputed - stored).abs() < 1e-9 * stored.abs().max(1.0));
        }
    }
}

#[test]
fn regret_is_zero_at_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let base = write(dir.path(), "u.toml", UNIFORM_SA);
    let best = ok_json(&["solve", "--config", base.to_str().unwrap()]);
    let (a, b) = (best["a"].as_f64().unwrap(), best["b"].as_f64().unwrap());
    let fixed = UNIFORM_SA.replace(
        r#"kind = "sa"
params = { a0 = 0.6, b0 = 0.6 }"#,
        &format!("kind = \"fixed\"\nparams = {{ a = {a:?}, b = {b:?} }}"),
    );
    let cfg = write(dir.path(), "fixed.toml", &fixed);
    let out = dir.path().join("runs");
    ok_json(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--full"]);
    let v = ok_json(&[
        "regret",
        out.join("fixed_seed5_r0.csv").to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(v["regret_stochastic"].as_f64().unwrap(), 0.0);
}

#[test]
fn resolve_reports_cash_flow() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "u.toml", UNIFORM_SA);
    let out = run(&["simulate", "--config", cfg.to_str().unwrap(), "--resolve", "0.3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(!row.ends_with(','), "cash flow column is filled: {row}");
}

#[test]
fn bad_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", &UNIFORM_SA.replace("g = 0.5", "g = 1.5"));
    let out = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`g`"));
    let missing = run(&["solve", "--config", dir.path().join("nope.toml").to_str().unwrap()]);
    assert!(!missing.status.success());
    assert!(!run(&["solve"]).status.success());
}

#[test]
fn sweep_isolates_a_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.toml", UNIFORM_SA);
    let bad = write(dir.path(), "bad.toml", &UNIFORM_SA.replace("a0 = 0.6", "a0 = 0.3"));
    let other = write(dir.path(), "other.toml", &UNIFORM_SA.replace("seeds = [5]", "seeds = [1, 2]"));
    let out_dir = dir.path().join("sweep");
    let out = bin()
        .args(["sweep", "--config", good.to_str().unwrap(), bad.to_str().unwrap(), other.to_str().unwrap()])
        .args(["--out", out_dir.to_str().unwrap()])
        .env("BOOKIE_LAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(!out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["aggregates"].as_array().unwrap().len(), 2);
    assert_eq!(v["aggregates"][1]["config_index"], 2);
    assert_eq!(v["aggregates"][1]["runs"], 2);
    assert_eq!(v["failures"][0]["config_index"], 1);
    let rows = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(rows.lines().count(), 4);
}
