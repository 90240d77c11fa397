//! Kelly bettors: the optimal stake for a log-wealth maximiser facing the
//! bookmaker's quotes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::Prices;

/// Largest fraction of wealth a certain (`p = 1`) bettor is allowed to stake.
const CERTAIN_STAKE_CAP: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AgentError {
    #[error("stake {stake} must lie in [0, {wealth})")]
    Domain { stake: f64, wealth: f64 },
    #[error("invalid bettor: {0}")]
    InvalidBettor(String),
}

/// One arriving bettor: belief that R happens and the wealth they bring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BettorDraw {
    pub belief: f64,
    pub wealth: f64,
}

impl BettorDraw {
    pub fn new(belief: f64, wealth: f64) -> Result<Self, AgentError> {
        if !(0.0..=1.0).contains(&belief) {
            return Err(AgentError::InvalidBettor(format!("belief {belief} outside [0, 1]")));
        }
        if !(wealth >= 0.0 && wealth.is_finite()) {
            return Err(AgentError::InvalidBettor(format!("wealth {wealth} must be >= 0")));
        }
        Ok(Self { belief, wealth })
    }

    /// Belief in L.
    pub fn complement(&self) -> f64 {
        1.0 - self.belief
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    ForR,
    ForL,
    NoBet,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::ForR => "R",
            Side::ForL => "L",
            Side::NoBet => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "R" => Some(Side::ForR),
            "L" => Some(Side::ForL),
            "none" | "" => Some(Side::NoBet),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetOutcome {
    pub side: Side,
    pub stake: f64,
}

impl BetOutcome {
    pub const NONE: BetOutcome = BetOutcome { side: Side::NoBet, stake: 0.0 };
}

/// Kelly-optimal response to `prices`.
///
/// Bets `w (p - a)/(1 - a)` on R when `p > a`, `w (q - b)/(1 - b)` on L when
/// `q > b`, and nothing inside the dead zone `1 - b <= p <= a`.
pub fn kelly_bet(draw: &BettorDraw, prices: &Prices) -> BetOutcome {
    let (a, b) = (prices.a(), prices.b());
    let p = draw.belief;
    let q = draw.complement();
    if p > a {
        let frac = ((p - a) / (1.0 - a)).min(CERTAIN_STAKE_CAP);
        BetOutcome { side: Side::ForR, stake: draw.wealth * frac }
    } else if q > b {
        let frac = ((q - b) / (1.0 - b)).min(CERTAIN_STAKE_CAP);
        BetOutcome { side: Side::ForL, stake: draw.wealth * frac }
    } else {
        BetOutcome::NONE
    }
}

/// Expected log wealth after staking `stake` on `side`.
pub fn bettor_utility(draw: &BettorDraw, prices: &Prices, stake: f64, side: Side) -> Result<f64, AgentError> {
    let w = draw.wealth;
    if !(stake >= 0.0 && stake < w) {
        return Err(AgentError::Domain { stake, wealth: w });
    }
    let (p, q) = (draw.belief, draw.complement());
    let value = match side {
        Side::ForR => {
            let odds = (1.0 - prices.a()) / prices.a();
            xlogy(p, w + odds * stake) + xlogy(q, w - stake)
        }
        Side::ForL => {
            let odds = (1.0 - prices.b()) / prices.b();
            xlogy(q, w + odds * stake) + xlogy(p, w - stake)
        }
        Side::NoBet => w.ln(),
    };
    Ok(value)
}

/// `x ln y` with the `0 ln 0 = 0` convention.
fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}
