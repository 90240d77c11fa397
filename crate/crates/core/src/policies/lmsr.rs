use super::{BetObservation, PolicyError, PricingPolicy, Trade};
use crate::agents::{BettorDraw, Side};
use crate::market::Prices;
use crate::numeric::{logit, sigmoid};

/// Largest fraction of wealth a trader may spend, as for fixed-odds bets.
const SPEND_CAP: f64 = 1.0 - 1e-12;

/// Logarithmic market scoring rule market maker.
///
/// Cost function `C(s) = β ln(e^{s_R/β} + e^{s_L/β})`; the quoted price of R
/// is `∂C/∂s_R`, so quotes are always fair. Each Kelly trader spends the
/// amount that maximises their expected log wealth given the price impact.
#[derive(Debug, Clone)]
pub struct LmsrPolicy {
    liquidity: f64,
    shares_r: f64,
    shares_l: f64,
}

impl LmsrPolicy {
    pub fn new(liquidity: f64, start: f64) -> Result<Self, PolicyError> {
        if !(liquidity > 0.0 && liquidity.is_finite()) {
            return Err(PolicyError::InvalidParameter(format!("liquidity {liquidity} must be positive")));
        }
        Prices::fair(start)?;
        Ok(Self { liquidity, shares_r: liquidity * logit(start), shares_l: 0.0 })
    }

    pub fn shares(&self) -> (f64, f64) {
        (self.shares_r, self.shares_l)
    }

    pub fn price_r(&self) -> f64 {
        sigmoid((self.shares_r - self.shares_l) / self.liquidity)
    }

    /// Shares of the given side bought by spending `cost`, from
    /// `C(s + x e_side) - C(s) = cost`.
    pub fn shares_for_cost(&self, side: Side, cost: f64) -> f64 {
        let own = match side {
            Side::ForR => self.price_r(),
            Side::ForL => 1.0 - self.price_r(),
            Side::NoBet => return 0.0,
        };
        let growth = (cost / self.liquidity).exp_m1();
        // ln((e^{c/β} - (1 - π)) / π) = ln(1 + (e^{c/β} - 1)/π)
        self.liquidity * (growth / own).ln_1p()
    }

    /// Derivative of the trader's expected log wealth in the amount spent.
    fn utility_slope(&self, side: Side, belief: f64, wealth: f64, cost: f64) -> f64 {
        let own = match side {
            Side::ForR => self.price_r(),
            _ => 1.0 - self.price_r(),
        };
        let e = (cost / self.liquidity).exp();
        let shares = self.shares_for_cost(side, cost);
        let dshares = e / (e - (1.0 - own));
        belief * (dshares - 1.0) / (wealth - cost + shares) - (1.0 - belief) / (wealth - cost)
    }
}

impl PricingPolicy for LmsrPolicy {
    fn name(&self) -> &'static str {
        "lmsr"
    }

    fn quote(&self) -> Prices {
        Prices::fair(self.price_r()).expect("logistic price stays inside (0, 1)")
    }

    fn respond(&self, draw: &BettorDraw) -> Trade {
        let price = self.price_r();
        let (side, belief) = if draw.belief > price {
            (Side::ForR, draw.belief)
        } else if draw.complement() > 1.0 - price {
            (Side::ForL, draw.complement())
        } else {
            return Trade::NONE;
        };
        let wealth = draw.wealth;
        if wealth <= 0.0 {
            return Trade::NONE;
        }
        // Log utility is concave in the amount spent; bisect on its slope.
        let cap = wealth * SPEND_CAP;
        let cost = if self.utility_slope(side, belief, wealth, cap) >= 0.0 {
            cap
        } else {
            let (mut lo, mut hi) = (0.0, cap);
            while hi - lo > 1e-9 * wealth {
                let mid = 0.5 * (lo + hi);
                if self.utility_slope(side, belief, wealth, mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        Trade { side, stake: cost, payout: self.shares_for_cost(side, cost) }
    }

    fn observe(&mut self, bet: &BetObservation) {
        let shares = self.shares_for_cost(bet.side, bet.stake);
        match bet.side {
            Side::ForR => self.shares_r += shares,
            Side::ForL => self.shares_l += shares,
            Side::NoBet => {}
        }
    }
}
