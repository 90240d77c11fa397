//! Simulation and analysis of a two-outcome betting market in which a
//! bookmaker quotes prices to a stream of Kelly bettors.
//!
//! The crate is split by concern: belief laws ([`beliefs`]), bettor behaviour
//! ([`agents`]), bookmaker profit and its optimisers ([`market`]), online
//! pricing rules ([`policies`]), regret ([`metrics`]) and the experiment
//! driver ([`sim`]). The most used types are re-exported at the root.

pub mod agents;
pub mod beliefs;
pub mod market;
pub mod metrics;
pub mod numeric;
pub mod policies;
pub mod sim;

pub use agents::{bettor_utility, kelly_bet, AgentError, BetOutcome, BettorDraw, Side};
pub use beliefs::{sosd_compare, BeliefDistribution, BeliefError, BeliefSpec, Dominance};
pub use market::{
    count_foc_roots, expected_profit, fair_profit, foc_residuals, profit_gradient, profit_lower_bounds,
    solve_fair_optimal, solve_optimal_prices, BookmakerBelief, MarketError, Maximiser, Prices, SolveMethod,
};
pub use metrics::{
    adversarial_regret, regret_rate_fit, stochastic_regret, MetricsError, StepRecord, Trajectory,
};
pub use policies::{estimate_belief, BetObservation, PolicyError, PolicySpec, PricingPolicy, StepSchedule};
pub use sim::{run_experiment, run_sweep, simulate, ExperimentConfig, RunSummary, SimError};
