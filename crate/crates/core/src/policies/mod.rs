//! Online price-setting policies.
//!
//! A policy quotes prices, hears back what each arriving bettor did, and
//! updates. The simulator only talks to policies through [`PricingPolicy`],
//! so the learning rules and the baselines are interchangeable.

mod ftl;
mod lmsr;
mod risk_balance;
mod sa;

pub use ftl::FtlPolicy;
pub use lmsr::LmsrPolicy;
pub use risk_balance::RiskBalancePolicy;
pub use sa::SaPolicy;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{kelly_bet, BettorDraw, Side};
use crate::market::{BookmakerBelief, MarketError, Prices};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("no bet was placed, so there is no belief to estimate")]
    NoBetObserved,
    #[error("invalid policy parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Market(#[from] MarketError),
}

/// What the bookmaker sees after a bettor arrives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetObservation {
    pub side: Side,
    pub stake: f64,
    /// Bookmaker's estimate `ŵ` of the bettor's wealth.
    pub wealth_estimate: f64,
}

/// A bettor's response: side, amount paid in, and the amount paid out if the
/// chosen side wins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trade {
    pub side: Side,
    pub stake: f64,
    pub payout: f64,
}

impl Trade {
    pub const NONE: Trade = Trade { side: Side::NoBet, stake: 0.0, payout: 0.0 };

    /// A Kelly bet at fixed odds: the stake buys `stake / price` unit claims.
    pub fn kelly(draw: &BettorDraw, prices: &Prices) -> Self {
        let bet = kelly_bet(draw, prices);
        let payout = match bet.side {
            Side::ForR => bet.stake / prices.a(),
            Side::ForL => bet.stake / prices.b(),
            Side::NoBet => 0.0,
        };
        Trade { side: bet.side, stake: bet.stake, payout }
    }
}

pub trait PricingPolicy: Send {
    fn name(&self) -> &'static str;

    /// Current quotes. Depends only on the policy's state.
    fn quote(&self) -> Prices;

    /// How a Kelly bettor trades against this policy. Fixed-odds policies
    /// leave the default; market makers with a moving price override it.
    fn respond(&self, draw: &BettorDraw) -> Trade {
        Trade::kelly(draw, &self.quote())
    }

    /// Called exactly once per arriving bettor, in arrival order.
    fn observe(&mut self, bet: &BetObservation);

    /// Number of updates that had to be clamped back into the valid price range.
    fn clamp_count(&self) -> u64 {
        0
    }
}

/// Inverts the Kelly stake into the bettor's belief:
/// `a + (1 - a) v/ŵ` for a bet on R, `(1 - b)(1 - v/ŵ)` for a bet on L.
pub fn estimate_belief(prices: &Prices, bet: &BetObservation) -> Result<f64, PolicyError> {
    let frac = bet.stake / bet.wealth_estimate;
    match bet.side {
        Side::ForR => Ok(prices.a() + (1.0 - prices.a()) * frac),
        Side::ForL => Ok((1.0 - prices.b()) * (1.0 - frac)),
        Side::NoBet => Err(PolicyError::NoBetObserved),
    }
}

/// Learning-rate schedule. `eta(k)` is the rate for the update made after
/// `k` earlier updates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSchedule {
    Constant(f64),
    /// `γ / (k + m)`.
    Harmonic {
        gamma: f64,
        offset: f64,
    },
}

impl StepSchedule {
    pub fn eta(&self, k: u64) -> f64 {
        match *self {
            StepSchedule::Constant(eta) => eta,
            StepSchedule::Harmonic { gamma, offset } => gamma / (k as f64 + offset),
        }
    }

    fn validate(&self) -> Result<(), PolicyError> {
        let ok = match *self {
            StepSchedule::Constant(eta) => eta > 0.0 && eta.is_finite(),
            StepSchedule::Harmonic { gamma, offset } => gamma > 0.0 && offset > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(PolicyError::InvalidParameter(format!("bad step schedule {self:?}")))
        }
    }
}

/// `(γ, m) = (300, 5000)`.
pub fn sa_default_schedule() -> (f64, f64) {
    (300.0, 5000.0)
}

impl Default for StepSchedule {
    fn default() -> Self {
        let (gamma, offset) = sa_default_schedule();
        StepSchedule::Harmonic { gamma, offset }
    }
}

/// Quotes a fixed pair forever.
#[derive(Debug, Clone)]
pub struct FixedPolicy {
    prices: Prices,
}

impl FixedPolicy {
    pub fn new(prices: Prices) -> Self {
        Self { prices }
    }
}

impl PricingPolicy for FixedPolicy {
    fn name(&self) -> &'static str {
        "fixed"
    }

    fn quote(&self) -> Prices {
        self.prices
    }

    fn observe(&mut self, _bet: &BetObservation) {}
}

fn default_start() -> f64 {
    0.55
}

fn default_gamma() -> f64 {
    sa_default_schedule().0
}

fn default_offset() -> f64 {
    sa_default_schedule().1
}

fn default_tau() -> f64 {
    0.01
}

fn default_half() -> f64 {
    0.5
}

/// Serialisable policy choice, as written in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum PolicySpec {
    Sa {
        #[serde(default = "default_start")]
        a0: f64,
        #[serde(default = "default_start")]
        b0: f64,
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default = "default_offset")]
        offset: f64,
        /// Give each side its own schedule index instead of a shared one.
        #[serde(default)]
        per_side_counters: bool,
    },
    Ftl {
        /// Starting price; defaults to `g`.
        #[serde(default)]
        a0: Option<f64>,
        #[serde(default = "default_tau")]
        tau: f64,
    },
    RiskBalance {
        #[serde(default = "default_start")]
        a0: f64,
        #[serde(default = "default_start")]
        b0: f64,
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default = "default_offset")]
        offset: f64,
    },
    Lmsr {
        /// Liquidity; defaults to 100 times the mean wealth.
        #[serde(default)]
        liquidity: Option<f64>,
        #[serde(default = "default_half")]
        a0: f64,
    },
    Fixed {
        a: f64,
        b: f64,
    },
}

impl PolicySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            PolicySpec::Sa { .. } => "sa",
            PolicySpec::Ftl { .. } => "ftl",
            PolicySpec::RiskBalance { .. } => "risk_balance",
            PolicySpec::Lmsr { .. } => "lmsr",
            PolicySpec::Fixed { .. } => "fixed",
        }
    }

    pub fn build(
        &self,
        belief: &BookmakerBelief,
        wealth_mean: f64,
    ) -> Result<Box<dyn PricingPolicy>, PolicyError> {
        Ok(match *self {
            PolicySpec::Sa { a0, b0, gamma, offset, per_side_counters } => {
                let schedule = StepSchedule::Harmonic { gamma, offset };
                let mut policy = SaPolicy::new(Prices::new(a0, b0)?, *belief, schedule)?;
                policy.set_per_side_counters(per_side_counters);
                Box::new(policy)
            }
            PolicySpec::Ftl { a0, tau } => Box::new(FtlPolicy::new(a0.unwrap_or(belief.g), belief.g, tau)?),
            PolicySpec::RiskBalance { a0, b0, gamma, offset } => Box::new(RiskBalancePolicy::new(
                Prices::new(a0, b0)?,
                StepSchedule::Harmonic { gamma, offset },
            )?),
            PolicySpec::Lmsr { liquidity, a0 } => {
                Box::new(LmsrPolicy::new(liquidity.unwrap_or(100.0 * wealth_mean), a0)?)
            }
            PolicySpec::Fixed { a, b } => Box::new(FixedPolicy::new(Prices::new(a, b)?)),
        })
    }
}
