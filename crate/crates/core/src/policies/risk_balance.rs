use super::{BetObservation, PolicyError, PricingPolicy, StepSchedule};
use crate::agents::Side;
use crate::market::Prices;

const FLOOR: f64 = 1e-9;
const CEILING: f64 = 1.0 - 1e-9;

/// Moves both prices toward equal money on each side: `a += η (B_R - B_L)`,
/// `b += η (B_L - B_R)` after every arrival, where `B_R`, `B_L` are the
/// total stakes taken so far.
#[derive(Debug, Clone)]
pub struct RiskBalancePolicy {
    a: f64,
    b: f64,
    total_r: f64,
    total_l: f64,
    schedule: StepSchedule,
    arrivals: u64,
    clamps: u64,
}

impl RiskBalancePolicy {
    pub fn new(start: Prices, schedule: StepSchedule) -> Result<Self, PolicyError> {
        schedule.validate()?;
        Ok(Self { a: start.a(), b: start.b(), total_r: 0.0, total_l: 0.0, schedule, arrivals: 0, clamps: 0 })
    }

    /// Continue from existing stake totals.
    pub fn with_totals(mut self, total_r: f64, total_l: f64) -> Self {
        self.total_r = total_r;
        self.total_l = total_l;
        self
    }

    pub fn totals(&self) -> (f64, f64) {
        (self.total_r, self.total_l)
    }
}

impl PricingPolicy for RiskBalancePolicy {
    fn name(&self) -> &'static str {
        "risk_balance"
    }

    fn quote(&self) -> Prices {
        Prices::new(self.a, self.b).expect("risk-balance prices are projected onto a + b >= 1")
    }

    fn observe(&mut self, bet: &BetObservation) {
        match bet.side {
            Side::ForR => self.total_r += bet.stake,
            Side::ForL => self.total_l += bet.stake,
            Side::NoBet => {}
        }
        let eta = self.schedule.eta(self.arrivals);
        self.arrivals += 1;
        let imbalance = self.total_r - self.total_l;
        let (a, b) = (self.a + eta * imbalance, self.b - eta * imbalance);
        let (ca, cb) = (a.clamp(FLOOR, CEILING), b.clamp(FLOOR, CEILING));
        if ca != a || cb != b {
            self.clamps += 1;
        }
        let shift = (1.0 - ca - cb).max(0.0) / 2.0;
        self.a = ca + shift;
        self.b = cb + shift;
    }

    fn clamp_count(&self) -> u64 {
        self.clamps
    }
}
