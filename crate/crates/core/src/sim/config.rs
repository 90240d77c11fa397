use std::fmt;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::beliefs::{BeliefDistribution, BeliefSpec};
use crate::market::BookmakerBelief;
use crate::policies::PolicySpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Wealth law of arriving bettors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WealthSpec {
    Constant {
        value: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Log-normal with the given mean and log-scale standard deviation.
    Lognormal {
        mean: f64,
        sigma: f64,
    },
}

impl Default for WealthSpec {
    fn default() -> Self {
        WealthSpec::Constant { value: 1.0 }
    }
}

impl WealthSpec {
    pub fn mean(&self) -> f64 {
        match *self {
            WealthSpec::Constant { value } => value,
            WealthSpec::Uniform { lo, hi } => 0.5 * (lo + hi),
            WealthSpec::Lognormal { mean, .. } => mean,
        }
    }

    fn validate(&self) -> Result<(), String> {
        let ok = match *self {
            WealthSpec::Constant { value } => value > 0.0 && value.is_finite(),
            WealthSpec::Uniform { lo, hi } => lo >= 0.0 && hi > lo && hi.is_finite(),
            WealthSpec::Lognormal { mean, sigma } => mean > 0.0 && sigma >= 0.0 && sigma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(format!("{self:?} does not describe a positive wealth law"))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            WealthSpec::Constant { value } => value,
            WealthSpec::Uniform { lo, hi } => rng.random_range(lo..hi),
            WealthSpec::Lognormal { mean, sigma } => {
                let mu = mean.ln() - 0.5 * sigma * sigma;
                LogNormal::new(mu, sigma).expect("validated log-normal").sample(rng)
            }
        }
    }
}

/// Fixed prices that stochastic regret is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BenchmarkSpec {
    /// Global profit maximiser over all prices with `a + b >= 1`.
    #[default]
    Global,
    /// Best fair-odds prices.
    FairGlobal,
    Custom {
        a: f64,
        b: f64,
    },
}

/// What the bookmaker uses as `ŵ` when inverting a stake into a belief.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WealthEstimate {
    /// The mean of the wealth law.
    #[default]
    Oracle,
    /// Each bettor's own wealth.
    Disclosed,
}

/// Which steps are written to the trajectory CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cadence {
    /// Every step up to 1000, then every 1000th, plus the last.
    #[default]
    Sampled,
    Full,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: BeliefSpec,
    #[serde(default)]
    pub wealth: WealthSpec,
    pub g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_plus: Option<f64>,
    pub policy: PolicySpec,
    pub horizon: u64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub benchmark: BenchmarkSpec,
    #[serde(default)]
    pub wealth_estimate: WealthEstimate,
    #[serde(default)]
    pub cadence: Cadence,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Settle realized cash flows against an event that happens with this
    /// probability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolve_p_true: Option<f64>,
}

fn toml_field(err: &toml::de::Error) -> String {
    let msg = err.message();
    // serde reports missing or unknown keys with the key name in backticks.
    msg.split('`').nth(1).unwrap_or("<document>").to_string()
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::new(toml_field(&e), e.message()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| ConfigError::new("<document>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads TOML, or JSON when the file name ends in `.json`.
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|ext| ext == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.horizon < 1 {
            return Err(ConfigError::new("horizon", "must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::new("seeds", "at least one seed is required"));
        }
        if !(self.g > 0.0 && self.g < 1.0) {
            return Err(ConfigError::new("g", format!("{} must lie in (0, 1)", self.g)));
        }
        self.bookmaker_belief()?;
        self.belief_distribution()?;
        self.wealth.validate().map_err(|m| ConfigError::new("wealth", m))?;
        self.policy
            .build(&self.bookmaker_belief()?, self.wealth.mean())
            .map_err(|e| ConfigError::new("policy", e.to_string()))?;
        if let BenchmarkSpec::Custom { a, b } = self.benchmark {
            crate::market::Prices::new(a, b).map_err(|e| ConfigError::new("benchmark", e.to_string()))?;
        }
        if let Some(p) = self.resolve_p_true {
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::new("resolve_p_true", format!("{p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn bookmaker_belief(&self) -> Result<BookmakerBelief, ConfigError> {
        let belief = match (self.g_minus, self.g_plus) {
            (None, None) => BookmakerBelief::new(self.g),
            (Some(lo), Some(hi)) => BookmakerBelief::imprecise(lo, self.g, hi),
            _ => return Err(ConfigError::new("g_minus", "g_minus and g_plus must be given together")),
        };
        belief.map_err(|e| ConfigError::new("g", e.to_string()))
    }

    pub fn belief_distribution(&self) -> Result<BeliefDistribution, ConfigError> {
        BeliefDistribution::from_spec(self.distribution.clone())
            .map_err(|e| ConfigError::new("distribution", e.to_string()))
    }

    /// First 16 hex digits of the SHA-256 of the config's canonical JSON.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialises");
        Sha256::digest(json.as_bytes())[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
        g = 0.5
        horizon = 1000
        seeds = [1, 2]

        [distribution]
        kind = "two_block"
        params = { m = 0.75, delta1 = 0.25, delta2 = 0.1 }

        [policy]
        kind = "sa"
        params = { a0 = 0.6, b0 = 0.6 }
    "#;

    #[test]
    fn parses_toml_with_defaults() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.wealth, WealthSpec::Constant { value: 1.0 });
        assert_eq!(cfg.benchmark, BenchmarkSpec::Global);
        assert_eq!(cfg.cadence, Cadence::Sampled);
        assert_eq!(cfg.seeds, vec![1, 2]);
    }

    #[test]
    fn json_mirror_parses_to_same_config() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json_str(&json).unwrap(), cfg);
        assert_eq!(cfg.hash().len(), 16);
    }

    #[test]
    fn field_level_errors() {
        let bad_g = SAMPLE.replace("g = 0.5", "g = 1.5");
        assert_eq!(ExperimentConfig::from_toml_str(&bad_g).unwrap_err().field, "g");
        let no_horizon = SAMPLE.replace("horizon = 1000", "");
        assert_eq!(ExperimentConfig::from_toml_str(&no_horizon).unwrap_err().field, "horizon");
        let bad_dist = SAMPLE.replace("m = 0.75", "m = 0.95");
        assert_eq!(ExperimentConfig::from_toml_str(&bad_dist).unwrap_err().field, "distribution");
        let bad_policy = SAMPLE.replace("a0 = 0.6", "a0 = 0.3");
        assert_eq!(ExperimentConfig::from_toml_str(&bad_policy).unwrap_err().field, "policy");
        let no_seeds = SAMPLE.replace("seeds = [1, 2]", "seeds = []");
        assert_eq!(ExperimentConfig::from_toml_str(&no_seeds).unwrap_err().field, "seeds");
    }

    #[test]
    fn lognormal_wealth_has_requested_mean() {
        use rand::SeedableRng;
        let spec = WealthSpec::Lognormal { mean: 2.0, sigma: 0.5 };
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let n = 200_000;
        let avg = (0..n).map(|_| spec.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((avg - 2.0).abs() < 0.02);
    }
}
