use super::{margin_l, margin_r, BookmakerBelief, MarketError, Prices};
use crate::beliefs::BeliefDistribution;

/// Lower bounds on bookmaker profit. Each bound is computed independently and
/// reports `PreconditionUnmet` when it does not apply to the given quotes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitBounds {
    /// `(g - E[p])²`, a floor on the optimal profit.
    pub deviation_bound: f64,
    /// `CVaR_α(p) + CVaR_β(q) - (a + b)` with `α, β` the inverse margins;
    /// a floor on profit at the given quotes.
    pub cvar_bound: Result<f64, MarketError>,
    /// Profit evaluated at the pessimistic ends of an imprecise belief; a
    /// floor on profit under any true probability in the interval.
    pub imprecise_bound: Result<f64, MarketError>,
}

pub fn profit_lower_bounds(
    dist: &BeliefDistribution,
    belief: &BookmakerBelief,
    prices: &Prices,
) -> ProfitBounds {
    let g = belief.g;
    let (a, b) = (prices.a(), prices.b());
    ProfitBounds {
        deviation_bound: (g - dist.mean()).powi(2),
        cvar_bound: cvar_bound(dist, g, a, b),
        imprecise_bound: imprecise_bound(dist, belief, a, b),
    }
}

fn cvar_bound(dist: &BeliefDistribution, g: f64, a: f64, b: f64) -> Result<f64, MarketError> {
    if a < g.sqrt() || b < (1.0 - g).sqrt() {
        return Err(MarketError::PreconditionUnmet(format!(
            "cvar bound needs a >= sqrt(g) and b >= sqrt(1 - g), got ({a}, {b}) at g = {g}"
        )));
    }
    // The margins are at least 1 on this region, so both levels lie in (0, 1].
    let alpha = margin_r(a, g).recip().min(1.0);
    let beta = margin_l(b, g).recip().min(1.0);
    Ok(dist.cvar_upper(alpha)? + dist.cvar_upper_complement(beta)? - (a + b))
}

fn imprecise_bound(
    dist: &BeliefDistribution,
    belief: &BookmakerBelief,
    a: f64,
    b: f64,
) -> Result<f64, MarketError> {
    let Some((g_minus, g_plus)) = belief.interval else {
        return Err(MarketError::PreconditionUnmet("no imprecise belief interval given".into()));
    };
    if a < g_plus || 1.0 - b > g_minus {
        return Err(MarketError::PreconditionUnmet(format!(
            "imprecise bound needs a >= g+ and 1 - b <= g-, got ({a}, {b}) for ({g_minus}, {g_plus})"
        )));
    }
    Ok(margin_r(a, g_plus) * dist.tail_expectation_above(a)
        + margin_l(b, g_minus) * dist.tail_expectation_below(b))
}
