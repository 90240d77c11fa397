use super::{estimate_belief, BetObservation, PolicyError, PricingPolicy};
use crate::market::{solve_fair_optimal, Prices};

/// Follow the leader under fair odds: keep a running mean of estimated beliefs
/// and quote the fair price that would be optimal if that mean were exact.
#[derive(Debug, Clone)]
pub struct FtlPolicy {
    a: f64,
    g: f64,
    tau: f64,
    mean: f64,
    count: u64,
}

impl FtlPolicy {
    pub fn new(start: f64, g: f64, tau: f64) -> Result<Self, PolicyError> {
        if !(tau > 0.0 && tau < 0.5) {
            return Err(PolicyError::InvalidParameter(format!("tau = {tau} must lie in (0, 0.5)")));
        }
        Prices::fair(start)?;
        Ok(Self { a: start, g, tau, mean: 0.0, count: 0 })
    }

    /// Unclipped running mean of the belief estimates.
    pub fn mean_estimate(&self) -> f64 {
        self.mean
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

impl PricingPolicy for FtlPolicy {
    fn name(&self) -> &'static str {
        "ftl"
    }

    fn quote(&self) -> Prices {
        Prices::fair(self.a).expect("fair price stays inside (0, 1)")
    }

    fn observe(&mut self, bet: &BetObservation) {
        let Ok(p_hat) = estimate_belief(&self.quote(), bet) else { return };
        self.count += 1;
        self.mean += (p_hat - self.mean) / self.count as f64;
        let clipped = self.mean.max(self.tau).min(1.0 - self.tau);
        self.a = solve_fair_optimal(clipped, self.g);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::Side;

    fn on_r(stake: f64) -> BetObservation {
        BetObservation { side: Side::ForR, stake, wealth_estimate: 1.0 }
    }

    #[test]
    fn first_update_by_hand() {
        let mut ftl = FtlPolicy::new(0.5, 0.5, 0.05).unwrap();
        // p̂ = 0.8 at a = 0.5 means v = 0.6.
        ftl.observe(&on_r(0.6));
        assert!((ftl.mean_estimate() - 0.8).abs() < 1e-15);
        assert!((ftl.quote().a() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn constant_estimates_are_a_fixed_point() {
        let mut ftl = FtlPolicy::new(0.5, 0.5, 0.05).unwrap();
        for _ in 0..50 {
            // Always report p̂ = 0.7 whatever the current price is.
            let a = ftl.quote().a();
            ftl.observe(&on_r((0.7 - a) / (1.0 - a)));
            assert!((ftl.mean_estimate() - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_is_clipped_before_pricing() {
        let mut ftl = FtlPolicy::new(0.5, 0.5, 0.05).unwrap();
        // A stake above the wealth estimate gives p̂ = 0.5 + 0.5 * 1.4 = 1.2.
        ftl.observe(&on_r(1.4));
        assert!((ftl.mean_estimate() - 1.2).abs() < 1e-12);
        assert!((ftl.quote().a() - solve_fair_optimal(0.95, 0.5)).abs() < 1e-15);
    }

    #[test]
    fn no_bet_is_ignored() {
        let mut ftl = FtlPolicy::new(0.4, 0.5, 0.05).unwrap();
        ftl.observe(&BetObservation { side: Side::NoBet, stake: 0.0, wealth_estimate: 1.0 });
        assert_eq!(ftl.count(), 0);
        assert_eq!(ftl.quote().a(), 0.4);
    }
}
