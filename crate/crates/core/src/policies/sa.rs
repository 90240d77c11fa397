use super::{estimate_belief, BetObservation, PolicyError, PricingPolicy, StepSchedule};
use crate::agents::Side;
use crate::market::{BookmakerBelief, Prices, G};

const PRICE_CEILING: f64 = 1.0 - 1e-9;

/// Stochastic-approximation pricing.
///
/// Each bet on R moves `a` by `-η (a + G(a; g) - p̂)`; each bet on L moves `b`
/// by `-η (b + G(b; 1 - g) - 1 + p̂)`. The fixed points are the first-order
/// conditions of expected profit. With an imprecise belief the R side prices
/// with `g+` and the L side with `g-`.
#[derive(Debug, Clone)]
pub struct SaPolicy {
    a: f64,
    b: f64,
    g_r: f64,
    g_l: f64,
    schedule: StepSchedule,
    per_side: bool,
    updates_r: u64,
    updates_l: u64,
    clamps: u64,
}

impl SaPolicy {
    pub fn new(start: Prices, belief: BookmakerBelief, schedule: StepSchedule) -> Result<Self, PolicyError> {
        schedule.validate()?;
        let (g_r, g_l) = (belief.r_side(), belief.l_side());
        if start.a() < g_r || start.b() < 1.0 - g_l {
            return Err(PolicyError::InvalidParameter(format!(
                "start ({}, {}) must satisfy a >= {g_r} and b >= {}",
                start.a(),
                start.b(),
                1.0 - g_l
            )));
        }
        Ok(Self {
            a: start.a(),
            b: start.b(),
            g_r,
            g_l,
            schedule,
            per_side: false,
            updates_r: 0,
            updates_l: 0,
            clamps: 0,
        })
    }

    /// Index each side's schedule by its own update count.
    pub fn set_per_side_counters(&mut self, on: bool) {
        self.per_side = on;
    }

    /// Updates applied so far (bets on either side).
    pub fn updates(&self) -> u64 {
        self.updates_r + self.updates_l
    }

    fn step_index(&self, side: Side) -> u64 {
        match (self.per_side, side) {
            (true, Side::ForR) => self.updates_r,
            (true, _) => self.updates_l,
            (false, _) => self.updates(),
        }
    }

    fn clamp(&mut self, x: f64, lo: f64) -> f64 {
        if x < lo {
            self.clamps += 1;
            lo
        } else if x > PRICE_CEILING {
            self.clamps += 1;
            PRICE_CEILING
        } else {
            x
        }
    }
}

impl PricingPolicy for SaPolicy {
    fn name(&self) -> &'static str {
        "sa"
    }

    fn quote(&self) -> Prices {
        Prices::new(self.a, self.b).expect("SA prices stay above g and 1 - g")
    }

    fn observe(&mut self, bet: &BetObservation) {
        let Ok(p_hat) = estimate_belief(&self.quote(), bet) else { return };
        // Stakes above the wealth estimate would push p̂ outside [0, 1].
        let p_hat = p_hat.clamp(0.0, 1.0);
        let eta = self.schedule.eta(self.step_index(bet.side));
        match bet.side {
            Side::ForR => {
                let next = self.a - eta * (self.a + G(self.a, self.g_r) - p_hat);
                self.a = self.clamp(next, self.g_r);
                self.updates_r += 1;
            }
            Side::ForL => {
                let next = self.b - eta * (self.b + G(self.b, 1.0 - self.g_l) - 1.0 + p_hat);
                self.b = self.clamp(next, 1.0 - self.g_l);
                self.updates_l += 1;
            }
            Side::NoBet => {}
        }
    }

    fn clamp_count(&self) -> u64 {
        self.clamps
    }
}
