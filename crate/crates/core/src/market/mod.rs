//! The bookmaker's side of the market: quoted prices, expected profit against
//! a crowd of Kelly bettors, its gradient and first-order conditions, and
//! solvers for the profit-maximising quotes.
//!
//! Profit is always per bettor of unit wealth and taken in expectation under
//! the bookmaker's own belief `g` that R occurs. It splits into an R-side term
//! depending only on `a` and an L-side term depending only on `b`:
//!
//! ```text
//! u(a, b) = (a - g)/(a(1 - a)) · E[(p - a)+] + (b - (1 - g))/(b(1 - b)) · E[(q - b)+]
//! ```
//!
//! The L side is the R side with beliefs `q = 1 - p` and bookmaker belief
//! `1 - g`, which is how every L-side quantity here is evaluated.

mod bounds;
mod solver;

pub use bounds::{profit_lower_bounds, ProfitBounds};
pub use solver::{
    count_foc_roots, foc_roots, foc_roots_l, solve_fair_optimal, solve_optimal_prices, Maximiser, SolveMethod,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beliefs::{BeliefDistribution, BeliefError};

/// Slack allowed on `a + b >= 1` for prices built from floating arithmetic.
pub const OVERROUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketError {
    #[error("invalid prices: {0}")]
    InvalidPrices(String),
    #[error("invalid bookmaker belief: {0}")]
    InvalidBelief(String),
    #[error("optimum ({a}, {b}) sits on the search boundary")]
    NoInteriorMax { a: f64, b: f64 },
    #[error("profit has no positive local maximum on the {side} side")]
    NoMaximiser { side: &'static str },
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

/// Quote pair: `a` is the price of a unit claim on R, `b` on L.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPrices")]
pub struct Prices {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
struct RawPrices {
    a: f64,
    b: f64,
}

impl TryFrom<RawPrices> for Prices {
    type Error = MarketError;
    fn try_from(raw: RawPrices) -> Result<Self, Self::Error> {
        Prices::new(raw.a, raw.b)
    }
}

impl Prices {
    pub fn new(a: f64, b: f64) -> Result<Self, MarketError> {
        if !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
            return Err(MarketError::InvalidPrices(format!("({a}, {b}) must lie in (0, 1)^2")));
        }
        if a + b < 1.0 - OVERROUND_SLACK {
            return Err(MarketError::InvalidPrices(format!(
                "({a}, {b}) has a + b < 1, which allows arbitrage"
            )));
        }
        Ok(Self { a, b })
    }

    /// Fair quotes `(a, 1 - a)`.
    pub fn fair(a: f64) -> Result<Self, MarketError> {
        Self::new(a, 1.0 - a)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn overround(&self) -> f64 {
        self.a + self.b - 1.0
    }
}

/// The bookmaker's belief that R happens, optionally bracketed by an
/// imprecise interval `g_minus <= g <= g_plus`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BookmakerBelief {
    pub g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
}

impl BookmakerBelief {
    pub fn new(g: f64) -> Result<Self, MarketError> {
        if !(g > 0.0 && g < 1.0) {
            return Err(MarketError::InvalidBelief(format!("g = {g} must lie in (0, 1)")));
        }
        Ok(Self { g, interval: None })
    }

    pub fn imprecise(g_minus: f64, g: f64, g_plus: f64) -> Result<Self, MarketError> {
        let mut belief = Self::new(g)?;
        if !(0.0 <= g_minus && g_minus <= g && g <= g_plus && g_plus <= 1.0) {
            return Err(MarketError::InvalidBelief(format!(
                "need 0 <= g- <= g <= g+ <= 1, got ({g_minus}, {g}, {g_plus})"
            )));
        }
        belief.interval = Some((g_minus, g_plus));
        Ok(belief)
    }

    /// Belief used when pricing R: the pessimistic upper end if imprecise.
    pub fn r_side(&self) -> f64 {
        self.interval.map_or(self.g, |(_, hi)| hi)
    }

    /// Belief used when pricing L: the pessimistic lower end if imprecise.
    pub fn l_side(&self) -> f64 {
        self.interval.map_or(self.g, |(lo, _)| lo)
    }
}

/// Bookmaker's margin per unit staked on R at price `a`: `(1-g)/(1-a) - g/a`.
pub fn margin_r(a: f64, g: f64) -> f64 {
    (a - g) / (a * (1.0 - a))
}

/// Margin per unit staked on L at price `b`: `g/(1-b) - (1-g)/b`.
pub fn margin_l(b: f64, g: f64) -> f64 {
    margin_r(b, 1.0 - g)
}

/// R-side profit term `margin_r(a) · E[(p - a)+]`.
pub fn profit_r(dist: &BeliefDistribution, g: f64, a: f64) -> f64 {
    margin_r(a, g) * dist.tail_expectation_above(a)
}

/// L-side profit term `margin_l(b) · E[(q - b)+]`.
pub fn profit_l(dist: &BeliefDistribution, g: f64, b: f64) -> f64 {
    margin_l(b, g) * dist.tail_expectation_below(b)
}

/// Expected profit from one bettor of unit wealth.
pub fn expected_profit(dist: &BeliefDistribution, g: f64, prices: &Prices) -> f64 {
    profit_r(dist, g, prices.a()) + profit_l(dist, g, prices.b())
}

/// Closed-form profit on the fair diagonal: `-(a - g)(a - E[p]) / (a(1 - a))`.
pub fn fair_profit(dist: &BeliefDistribution, g: f64, a: f64) -> f64 {
    fair_profit_from_mean(dist.mean(), g, a)
}

pub fn fair_profit_from_mean(mean_belief: f64, g: f64, a: f64) -> f64 {
    -(a - g) * (a - mean_belief) / (a * (1.0 - a))
}

/// Profit summed over `horizon` i.i.d. bettors with mean wealth `wealth_mean`.
pub fn total_utility(
    dist: &BeliefDistribution,
    wealth_mean: f64,
    g: f64,
    prices: &Prices,
    horizon: u64,
) -> f64 {
    horizon as f64 * expected_profit(dist, g, prices) * wealth_mean
}

fn margin_slope(x: f64, g: f64) -> f64 {
    (x * x - 2.0 * g * x + g) / (x * x * (1.0 - x) * (1.0 - x))
}

/// Analytic `(∂u/∂a, ∂u/∂b)`.
pub fn profit_gradient(dist: &BeliefDistribution, g: f64, prices: &Prices) -> (f64, f64) {
    let (a, b) = (prices.a(), prices.b());
    // d/da E[(p - a)+] = -P(p > a); d/db E[(q - b)+] = -P(p < 1 - b).
    let da = -dist.upper_mass(a) * margin_r(a, g) + dist.tail_expectation_above(a) * margin_slope(a, g);
    let gl = 1.0 - g;
    let db = -dist.cdf(1.0 - b) * margin_r(b, gl) + dist.tail_expectation_below(b) * margin_slope(b, gl);
    (da, db)
}

/// `G(x) = x(1 - x)(x - g) / (x² - 2gx + g)`, the value the mean residual
/// life must match at a critical price.
#[allow(non_snake_case)]
pub fn G(x: f64, g: f64) -> f64 {
    x * (1.0 - x) * (x - g) / (x * x - 2.0 * g * x + g)
}

/// `Υ^R(a) = G(a; g) + a - E[p | p >= a]`. Negative where profit still rises in `a`.
pub fn foc_residual_r(dist: &BeliefDistribution, g: f64, a: f64) -> Result<f64, BeliefError> {
    Ok(G(a, g) + a - dist.conditional_tail_mean(a)?)
}

/// `Υ^L(b) = G(b; 1 - g) + b - E[q | q >= b]`.
pub fn foc_residual_l(dist: &BeliefDistribution, g: f64, b: f64) -> Result<f64, BeliefError> {
    Ok(G(b, 1.0 - g) + b - dist.conditional_complement_tail_mean(b)?)
}

pub fn foc_residuals(dist: &BeliefDistribution, g: f64, prices: &Prices) -> Result<(f64, f64), BeliefError> {
    Ok((foc_residual_r(dist, g, prices.a())?, foc_residual_l(dist, g, prices.b())?))
}
