//! Bettor-belief distributions on `[0, 1]` and the tail integrals the profit
//! formulas are built from.
//!
//! Every law exposes its cdf, the two hinge expectations `E[(p - a)+]` and
//! `E[(1 - b - p)+]`, and the conditional means derived from them. Uniform
//! blocks, point masses and empirical samples use exact piecewise formulas;
//! truncated normal and exponential laws use their closed forms; the
//! sigmoid-of-Gaussian mixture integrates its cdf numerically.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{
    bisect_monotone, golden_min, integrate, logit, normal_cdf, normal_pdf, normal_sf, sigmoid,
};

const QUAD_ABS_TOL: f64 = 1e-13;
const QUAD_REL_TOL: f64 = 1e-11;
const PARAM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeliefError {
    #[error("invalid belief parameter: {0}")]
    InvalidParameter(String),
    /// Conditioning on an event of probability zero, e.g. a price at or above
    /// the top of the support.
    #[error("tail at threshold {threshold} has zero probability")]
    UndefinedTail { threshold: f64 },
    #[error("distributions have different means ({left} vs {right})")]
    MeanMismatch { left: f64, right: f64 },
    #[error("grid step {0} outside (0, 0.01]")]
    InvalidGridStep(f64),
}

/// Serializable description of a belief law: `{kind, params}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum BeliefSpec {
    TwoBlock { m: f64, delta1: f64, delta2: f64 },
    SigmoidGaussianMixture { weights: Vec<f64>, means: Vec<f64>, stddevs: Vec<f64> },
    Uniform { lo: f64, hi: f64 },
    TruncatedNormal { mu: f64, sigma: f64 },
    TruncatedExponential { lambda: f64 },
    PointMass { p: f64 },
    Empirical { samples: Vec<f64> },
}

impl BeliefSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            BeliefSpec::TwoBlock { .. } => "two_block",
            BeliefSpec::SigmoidGaussianMixture { .. } => "sigmoid_gaussian_mixture",
            BeliefSpec::Uniform { .. } => "uniform",
            BeliefSpec::TruncatedNormal { .. } => "truncated_normal",
            BeliefSpec::TruncatedExponential { .. } => "truncated_exponential",
            BeliefSpec::PointMass { .. } => "point_mass",
            BeliefSpec::Empirical { .. } => "empirical",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Block {
    lo: f64,
    hi: f64,
    weight: f64,
}

impl Block {
    fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn cdf(&self, x: f64) -> f64 {
        self.weight * ((x - self.lo) / self.width()).clamp(0.0, 1.0)
    }

    fn above(&self, a: f64) -> f64 {
        if a <= self.lo {
            self.weight * (0.5 * (self.lo + self.hi) - a)
        } else if a >= self.hi {
            0.0
        } else {
            self.weight * (self.hi - a).powi(2) / (2.0 * self.width())
        }
    }

    fn below(&self, c: f64) -> f64 {
        if c >= self.hi {
            self.weight * (c - 0.5 * (self.lo + self.hi))
        } else if c <= self.lo {
            0.0
        } else {
            self.weight * (c - self.lo).powi(2) / (2.0 * self.width())
        }
    }
}

#[derive(Debug, Clone)]
struct Component {
    weight: f64,
    mean: f64,
    sd: f64,
}

#[derive(Debug, Clone)]
enum Law {
    Blocks(Vec<Block>),
    LogitMixture(Vec<Component>),
    TruncNormal { mu: f64, sigma: f64, z_lo: f64, z_hi: f64, mass: f64 },
    TruncExp { lambda: f64, norm: f64 },
    PointMass(f64),
    Empirical { sorted: Vec<f64>, prefix: Vec<f64> },
}

/// `Φ(hi) - Φ(lo)` without catastrophic cancellation in the upper tail.
fn normal_mass(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 {
        normal_sf(lo) - normal_sf(hi)
    } else {
        normal_cdf(hi) - normal_cdf(lo)
    }
}

/// A validated bettor-belief law. Immutable once built.
#[derive(Debug, Clone)]
pub struct BeliefDistribution {
    spec: BeliefSpec,
    law: Law,
    mean: f64,
}

impl PartialEq for BeliefDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), BeliefError> {
    if cond {
        Ok(())
    } else {
        Err(BeliefError::InvalidParameter(msg.into()))
    }
}

fn is_prob(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl BeliefDistribution {
    pub fn two_block(m: f64, delta1: f64, delta2: f64) -> Result<Self, BeliefError> {
        Self::from_spec(BeliefSpec::TwoBlock { m, delta1, delta2 })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, BeliefError> {
        Self::from_spec(BeliefSpec::Uniform { lo, hi })
    }

    pub fn sigmoid_gaussian_mixture(
        weights: Vec<f64>,
        means: Vec<f64>,
        stddevs: Vec<f64>,
    ) -> Result<Self, BeliefError> {
        Self::from_spec(BeliefSpec::SigmoidGaussianMixture { weights, means, stddevs })
    }

    pub fn truncated_normal(mu: f64, sigma: f64) -> Result<Self, BeliefError> {
        Self::from_spec(BeliefSpec::TruncatedNormal { mu, sigma })
    }

    pub fn truncated_exponential(lambda: f64) -> Result<Self, BeliefError> {
        Self::from_spec(BeliefSpec::TruncatedExponential { lambda })
    }

    pub fn point_mass(p: f64) -> Result<Self, BeliefError> {
        Self::from_spec(BeliefSpec::PointMass { p })
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self, BeliefError> {
        Self::from_spec(BeliefSpec::Empirical { samples })
    }

    /// The crowd used in the reference simulations: `sigmoid(s)` with
    /// `s ~ 0.25·N(2, 1) + 0.75·N(-1, 1)`.
    pub fn reference_mixture() -> Self {
        Self::sigmoid_gaussian_mixture(vec![0.25, 0.75], vec![2.0, -1.0], vec![1.0, 1.0])
            .expect("reference mixture parameters are valid")
    }

    pub fn from_spec(spec: BeliefSpec) -> Result<Self, BeliefError> {
        let law = match &spec {
            &BeliefSpec::TwoBlock { m, delta1, delta2 } => {
                check(m > 0.5 && m < 1.0, format!("two_block m={m} must lie in (0.5, 1)"))?;
                let cap = (m - 0.5).min(1.0 - m) + PARAM_SLACK;
                check(
                    delta1 > 0.0 && delta1 <= cap,
                    format!("two_block delta1={delta1} must lie in (0, {}]", cap - PARAM_SLACK),
                )?;
                check(
                    delta2 > 0.0 && delta2 <= cap,
                    format!("two_block delta2={delta2} must lie in (0, {}]", cap - PARAM_SLACK),
                )?;
                Law::Blocks(vec![
                    Block { lo: (1.0 - m - delta2).max(0.0), hi: 1.0 - m + delta2, weight: 0.5 },
                    Block { lo: m - delta1, hi: (m + delta1).min(1.0), weight: 0.5 },
                ])
            }
            &BeliefSpec::Uniform { lo, hi } => {
                check(
                    is_prob(lo) && is_prob(hi) && lo < hi,
                    format!("uniform bounds [{lo}, {hi}] must satisfy 0 <= lo < hi <= 1"),
                )?;
                Law::Blocks(vec![Block { lo, hi, weight: 1.0 }])
            }
            BeliefSpec::SigmoidGaussianMixture { weights, means, stddevs } => {
                check(!weights.is_empty(), "mixture needs at least one component")?;
                check(
                    weights.len() == means.len() && means.len() == stddevs.len(),
                    "mixture weights, means and stddevs must have equal length",
                )?;
                check(
                    weights.iter().all(|&w| w >= 0.0 && w.is_finite()),
                    "mixture weights must be non-negative",
                )?;
                let total: f64 = weights.iter().sum();
                check((total - 1.0).abs() < 1e-9, format!("mixture weights sum to {total}, not 1"))?;
                check(stddevs.iter().all(|&s| s > 0.0 && s.is_finite()), "mixture stddevs must be positive")?;
                check(means.iter().all(|m| m.is_finite()), "mixture means must be finite")?;
                Law::LogitMixture(
                    weights
                        .iter()
                        .zip(means)
                        .zip(stddevs)
                        .map(|((&weight, &mean), &sd)| Component { weight, mean, sd })
                        .collect(),
                )
            }
            &BeliefSpec::TruncatedNormal { mu, sigma } => {
                check(mu.is_finite(), "truncated_normal mu must be finite")?;
                check(sigma > 0.0 && sigma.is_finite(), "truncated_normal sigma must be positive")?;
                let z_lo = -mu / sigma;
                let z_hi = (1.0 - mu) / sigma;
                let mass = normal_mass(z_lo, z_hi);
                check(mass > 1e-300, "truncated_normal puts no mass on [0, 1]")?;
                Law::TruncNormal { mu, sigma, z_lo, z_hi, mass }
            }
            &BeliefSpec::TruncatedExponential { lambda } => {
                check(lambda > 0.0 && lambda.is_finite(), "truncated_exponential lambda must be positive")?;
                Law::TruncExp { lambda, norm: -(-lambda).exp_m1() }
            }
            &BeliefSpec::PointMass { p } => {
                check(is_prob(p), format!("point mass location {p} outside [0, 1]"))?;
                Law::PointMass(p)
            }
            BeliefSpec::Empirical { samples } => {
                check(!samples.is_empty(), "empirical law needs at least one sample")?;
                check(samples.iter().all(|&x| is_prob(x)), "empirical samples must lie in [0, 1]")?;
                let mut sorted = samples.clone();
                sorted.sort_by(f64::total_cmp);
                let mut prefix = Vec::with_capacity(sorted.len() + 1);
                prefix.push(0.0);
                let mut acc = 0.0;
                for &x in &sorted {
                    acc += x;
                    prefix.push(acc);
                }
                Law::Empirical { sorted, prefix }
            }
        };
        let mut dist = Self { spec, law, mean: f64::NAN };
        dist.mean = dist.tail_above(0.0);
        Ok(dist)
    }

    pub fn spec(&self) -> &BeliefSpec {
        &self.spec
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// True when the density is positive on all of `(0, 1)`.
    pub fn is_full_support(&self) -> bool {
        match &self.law {
            Law::LogitMixture(_) | Law::TruncNormal { .. } | Law::TruncExp { .. } => true,
            Law::Blocks(blocks) => blocks.len() == 1 && blocks[0].lo <= 0.0 && blocks[0].hi >= 1.0,
            Law::PointMass(_) | Law::Empirical { .. } => false,
        }
    }

    /// Density at `p`. Atoms (point masses, empirical samples) have no
    /// density and report 0.
    pub fn pdf(&self, p: f64) -> f64 {
        if !(0.0..=1.0).contains(&p) {
            return 0.0;
        }
        match &self.law {
            Law::Blocks(blocks) => {
                blocks.iter().filter(|b| p >= b.lo && p <= b.hi).map(|b| b.weight / b.width()).sum()
            }
            Law::LogitMixture(comps) => {
                if p <= 0.0 || p >= 1.0 {
                    return 0.0;
                }
                let s = logit(p);
                let jac = 1.0 / (p * (1.0 - p));
                comps.iter().map(|c| c.weight * normal_pdf((s - c.mean) / c.sd) / c.sd).sum::<f64>() * jac
            }
            Law::TruncNormal { mu, sigma, mass, .. } => normal_pdf((p - mu) / sigma) / (sigma * mass),
            Law::TruncExp { lambda, norm } => lambda * (-lambda * p).exp() / norm,
            Law::PointMass(_) | Law::Empirical { .. } => 0.0,
        }
    }

    /// Right-continuous cdf `P(p <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match &self.law {
            Law::Blocks(blocks) => blocks.iter().map(|b| b.cdf(x)).sum::<f64>().min(1.0),
            Law::LogitMixture(comps) => {
                if x <= 0.0 {
                    return 0.0;
                }
                let s = logit(x);
                comps.iter().map(|c| c.weight * normal_cdf((s - c.mean) / c.sd)).sum()
            }
            Law::TruncNormal { mu, sigma, z_lo, mass, .. } => {
                (normal_mass(*z_lo, (x - mu) / sigma) / mass).clamp(0.0, 1.0)
            }
            Law::TruncExp { lambda, norm } => (-(-lambda * x).exp_m1() / norm).min(1.0),
            &Law::PointMass(p0) => {
                if x >= p0 {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Empirical { sorted, .. } => sorted.partition_point(|&s| s <= x) as f64 / sorted.len() as f64,
        }
    }

    /// `P(p >= a)`. Equals `1 - cdf(a)` for continuous laws but is evaluated
    /// directly so deep upper tails keep their relative precision.
    pub fn upper_mass(&self, a: f64) -> f64 {
        if a <= 0.0 {
            return 1.0;
        }
        match &self.law {
            Law::Blocks(blocks) => blocks.iter().map(|b| b.weight - b.cdf(a)).sum::<f64>().max(0.0),
            Law::LogitMixture(comps) => {
                if a >= 1.0 {
                    return 0.0;
                }
                let s = logit(a);
                comps.iter().map(|c| c.weight * normal_sf((s - c.mean) / c.sd)).sum()
            }
            Law::TruncNormal { mu, sigma, z_hi, mass, .. } => {
                if a >= 1.0 {
                    return 0.0;
                }
                normal_mass((a - mu) / sigma, *z_hi) / mass
            }
            Law::TruncExp { lambda, norm } => {
                if a >= 1.0 {
                    return 0.0;
                }
                // (e^{-λa} - e^{-λ}) / (1 - e^{-λ})
                (-lambda * a).exp() * -(-lambda * (1.0 - a)).exp_m1() / norm
            }
            &Law::PointMass(p0) => {
                if a <= p0 {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Empirical { sorted, .. } => {
                let below = sorted.partition_point(|&s| s < a);
                (sorted.len() - below) as f64 / sorted.len() as f64
            }
        }
    }

    /// `E[(p - a)+]`.
    pub fn tail_expectation_above(&self, a: f64) -> f64 {
        self.tail_above(a)
    }

    /// `E[(1 - b - p)+] = E[(q - b)+]` with `q = 1 - p`.
    pub fn tail_expectation_below(&self, b: f64) -> f64 {
        self.hinge_below(1.0 - b)
    }

    fn tail_above(&self, a: f64) -> f64 {
        if a >= 1.0 {
            return 0.0;
        }
        match &self.law {
            Law::Blocks(blocks) => blocks.iter().map(|b| b.above(a)).sum(),
            Law::LogitMixture(_) => {
                let lo = a.max(0.0);
                let head = if a < 0.0 { -a } else { 0.0 };
                head + integrate(|p| self.upper_mass(p), lo, 1.0, QUAD_ABS_TOL, QUAD_REL_TOL)
            }
            Law::TruncNormal { mu, sigma, z_lo, z_hi, mass } => {
                let shift = (-a).max(0.0);
                let a = a.max(0.0);
                let alpha = if a == 0.0 { *z_lo } else { (a - mu) / sigma };
                let core =
                    (mu - a) * normal_mass(alpha, *z_hi) + sigma * (normal_pdf(alpha) - normal_pdf(*z_hi));
                (core / mass).max(0.0) + shift
            }
            Law::TruncExp { lambda, norm } => {
                let x = 1.0 - a.max(0.0);
                let core = (-lambda).exp() * ((lambda * x).exp_m1() / lambda - x);
                core / norm + (-a).max(0.0)
            }
            &Law::PointMass(p0) => (p0 - a).max(0.0),
            Law::Empirical { sorted, prefix } => {
                let k = sorted.partition_point(|&s| s <= a);
                let n = sorted.len();
                let upper_sum = prefix[n] - prefix[k];
                (upper_sum - a * (n - k) as f64) / n as f64
            }
        }
    }

    /// `E[(c - p)+]`.
    fn hinge_below(&self, c: f64) -> f64 {
        if c <= 0.0 {
            return 0.0;
        }
        match &self.law {
            Law::Blocks(blocks) => blocks.iter().map(|b| b.below(c)).sum(),
            Law::LogitMixture(_) => {
                let hi = c.min(1.0);
                let tail = if c > 1.0 { c - 1.0 } else { 0.0 };
                tail + integrate(|p| self.cdf(p), 0.0, hi, QUAD_ABS_TOL, QUAD_REL_TOL)
            }
            Law::TruncNormal { mu, sigma, z_lo, mass, .. } => {
                if c >= 1.0 {
                    return c - self.mean;
                }
                let gamma = (c - mu) / sigma;
                let core =
                    (c - mu) * normal_mass(*z_lo, gamma) + sigma * (normal_pdf(gamma) - normal_pdf(*z_lo));
                (core / mass).max(0.0)
            }
            Law::TruncExp { lambda, norm } => {
                if c >= 1.0 {
                    return c - self.mean;
                }
                ((c + (-lambda * c).exp_m1() / lambda) / norm).max(0.0)
            }
            &Law::PointMass(p0) => (c - p0).max(0.0),
            Law::Empirical { sorted, prefix } => {
                let k = sorted.partition_point(|&s| s < c);
                let n = sorted.len();
                (c * k as f64 - prefix[k]) / n as f64
            }
        }
    }

    /// `E[p | p >= a]`.
    pub fn conditional_tail_mean(&self, a: f64) -> Result<f64, BeliefError> {
        let mass = self.upper_mass(a);
        if mass <= 0.0 {
            return Err(BeliefError::UndefinedTail { threshold: a });
        }
        Ok(a + self.tail_above(a) / mass)
    }

    /// `E[q | q >= b]` for the complementary belief `q = 1 - p`.
    pub fn conditional_complement_tail_mean(&self, b: f64) -> Result<f64, BeliefError> {
        let c = 1.0 - b;
        let mass = self.cdf(c);
        if mass <= 0.0 {
            return Err(BeliefError::UndefinedTail { threshold: b });
        }
        Ok(b + self.hinge_below(c) / mass)
    }

    /// Mean residual life `E[p | p >= a] - a`.
    pub fn mean_residual_life(&self, a: f64) -> Result<f64, BeliefError> {
        Ok(self.conditional_tail_mean(a)? - a)
    }

    /// Smallest `x` with `cdf(x) >= u`.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match &self.law {
            &Law::PointMass(p0) => p0,
            Law::Empirical { sorted, .. } => {
                let n = sorted.len();
                let k = ((u * n as f64).ceil() as usize).clamp(1, n);
                sorted[k - 1]
            }
            _ => bisect_monotone(|x| self.cdf(x) >= u, 0.0, 1.0, 200),
        }
    }

    /// Upper-tail CVaR of the belief `p`: the mean of its top `alpha` mass.
    pub fn cvar_upper(&self, alpha: f64) -> Result<f64, BeliefError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(BeliefError::InvalidParameter(format!("cvar level {alpha} outside (0, 1]")));
        }
        if alpha >= 1.0 {
            return Ok(self.mean);
        }
        self.conditional_tail_mean(self.quantile(1.0 - alpha))
    }

    /// Upper-tail CVaR of the complementary belief `q = 1 - p`.
    pub fn cvar_upper_complement(&self, beta: f64) -> Result<f64, BeliefError> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(BeliefError::InvalidParameter(format!("cvar level {beta} outside (0, 1]")));
        }
        if beta >= 1.0 {
            return Ok(1.0 - self.mean);
        }
        let x = self.quantile(beta);
        self.conditional_complement_tail_mean(1.0 - x)
    }

    /// Rockafellar-Uryasev form `min_ρ ρ + E[(p - ρ)+]/α`, minimised by
    /// golden section over `ρ ∈ [0, 1]`.
    pub fn cvar_upper_variational(&self, alpha: f64) -> f64 {
        golden_min(|rho| rho + self.tail_above(rho) / alpha, 0.0, 1.0, 1e-12).1
    }

    /// One belief draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.law {
            Law::Blocks(blocks) => {
                let mut u: f64 = rng.random();
                let v: f64 = rng.random();
                for b in blocks {
                    if u < b.weight {
                        return b.lo + v * b.width();
                    }
                    u -= b.weight;
                }
                let last = blocks[blocks.len() - 1];
                last.lo + v * last.width()
            }
            Law::LogitMixture(comps) => {
                let mut u: f64 = rng.random();
                let z: f64 = rng.sample(StandardNormal);
                let mut pick = &comps[comps.len() - 1];
                for c in comps {
                    if u < c.weight {
                        pick = c;
                        break;
                    }
                    u -= c.weight;
                }
                sigmoid(pick.mean + pick.sd * z)
            }
            &Law::TruncNormal { mu, sigma, mass, .. } => {
                if mass > 0.05 {
                    loop {
                        let z: f64 = rng.sample(StandardNormal);
                        let x = mu + sigma * z;
                        if (0.0..=1.0).contains(&x) {
                            return x;
                        }
                    }
                }
                let u: f64 = rng.random();
                self.quantile(u)
            }
            &Law::TruncExp { lambda, norm } => {
                let u: f64 = rng.random();
                (-(-u * norm).ln_1p() / lambda).clamp(0.0, 1.0)
            }
            &Law::PointMass(p0) => p0,
            Law::Empirical { sorted, .. } => sorted[rng.random_range(0..sorted.len())],
        }
    }
}

impl Serialize for BeliefDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.spec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BeliefDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let spec = BeliefSpec::deserialize(d)?;
        Self::from_spec(spec).map_err(serde::de::Error::custom)
    }
}

/// Outcome of a second-order stochastic dominance comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// The first law SOSD-dominates the second (it is less dispersed).
    Dominates,
    DominatedBy,
    Incomparable,
}

/// Compares integrated cdfs `S(Z) = ∫₀^Z F` on a uniform grid.
///
/// `Dominates` requires `S₁(Z) < S₂(Z) - 1e-12` at every interior grid point
/// and equal means.
pub fn sosd_compare(
    first: &BeliefDistribution,
    second: &BeliefDistribution,
    grid_step: f64,
) -> Result<Dominance, BeliefError> {
    if !(grid_step > 0.0 && grid_step <= 0.01) {
        return Err(BeliefError::InvalidGridStep(grid_step));
    }
    if (first.mean() - second.mean()).abs() > 1e-9 {
        return Err(BeliefError::MeanMismatch { left: first.mean(), right: second.mean() });
    }
    const SLACK: f64 = 1e-12;
    let n = (1.0 / grid_step).round() as usize;
    let h = 1.0 / n as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    let (mut f1_prev, mut f2_prev) = (first.cdf(0.0), second.cdf(0.0));
    let (mut below, mut above) = (true, true);
    for k in 1..n {
        let z = k as f64 * h;
        let (f1, f2) = (first.cdf(z), second.cdf(z));
        s1 += 0.5 * h * (f1_prev + f1);
        s2 += 0.5 * h * (f2_prev + f2);
        f1_prev = f1;
        f2_prev = f2;
        below &= s1 < s2 - SLACK;
        above &= s2 < s1 - SLACK;
    }
    Ok(match (below, above) {
        (true, false) => Dominance::Dominates,
        (false, true) => Dominance::DominatedBy,
        _ => Dominance::Incomparable,
    })
}
