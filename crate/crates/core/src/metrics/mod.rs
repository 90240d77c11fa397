//! Regret and trajectory bookkeeping.

mod io;

pub use io::{read_trajectory_csv, write_trajectory_csv, CsvHeader, TrajectoryRow, SCHEMA_VERSION};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::Side;
use crate::beliefs::BeliefDistribution;
use crate::market::{margin_r, profit_l, profit_r, Prices};
use crate::numeric::golden_max;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("regret series has {len} points, at least {min} are needed")]
    SeriesTooShort { len: usize, min: usize },
    #[error("regret tail is not positive; growth is sublinear and dominated by the benchmark")]
    DegenerateSeries,
    #[error("trajectory csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("trajectory io: {0}")]
    Io(#[from] std::io::Error),
    #[error("trajectory format: {0}")]
    Format(String),
}

/// One arriving bettor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based arrival index.
    pub t: u64,
    pub a: f64,
    pub b: f64,
    pub side: Side,
    pub stake: f64,
    pub wealth: f64,
    /// The bettor's true belief, known only to the simulator.
    pub belief: f64,
    /// The policy's belief estimate, when a bet was placed.
    pub p_hat: Option<f64>,
    /// `u(a_t, b_t) · E[w]`.
    pub step_profit: f64,
    /// Amount owed to the bettor if their side wins.
    pub payout: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn push(&mut self, record: StepRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.t < record.t));
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn as_slice(&self) -> &[StepRecord] {
        &self.records
    }
}

/// Expected profit per unit-wealth bettor, remembering the last price on each
/// side. Most policies move one side per step, so this halves the number of
/// tail integrals.
pub struct ProfitCache<'a> {
    dist: &'a BeliefDistribution,
    g: f64,
    r: Option<(f64, f64)>,
    l: Option<(f64, f64)>,
}

impl<'a> ProfitCache<'a> {
    pub fn new(dist: &'a BeliefDistribution, g: f64) -> Self {
        Self { dist, g, r: None, l: None }
    }

    pub fn profit(&mut self, prices: &Prices) -> f64 {
        let (a, b) = (prices.a(), prices.b());
        let ur = match self.r {
            Some((x, u)) if x == a => u,
            _ => {
                let u = profit_r(self.dist, self.g, a);
                self.r = Some((a, u));
                u
            }
        };
        let ul = match self.l {
            Some((x, u)) if x == b => u,
            _ => {
                let u = profit_l(self.dist, self.g, b);
                self.l = Some((b, u));
                u
            }
        };
        ur + ul
    }
}

/// Cumulative stochastic regret against fixed `benchmark` prices:
/// `T u(bench) E[w] - Σ_{t<=T} u(a_t, b_t) E[w]`, one entry per record.
pub fn stochastic_regret(
    records: &[StepRecord],
    dist: &BeliefDistribution,
    g: f64,
    wealth_mean: f64,
    benchmark: &Prices,
) -> Vec<f64> {
    let mut cache = ProfitCache::new(dist, g);
    let per_step = cache.profit(benchmark) * wealth_mean;
    let mut regret = 0.0;
    records
        .iter()
        .map(|rec| {
            let prices = Prices::new(rec.a, rec.b).expect("trajectory prices are valid");
            regret += per_step - cache.profit(&prices) * wealth_mean;
            regret
        })
        .collect()
}

/// Same series from stored per-step profits, without the belief law.
pub fn stochastic_regret_from_profits(step_profits: &[f64], benchmark_step_profit: f64) -> Vec<f64> {
    let mut regret = 0.0;
    step_profits
        .iter()
        .map(|u| {
            regret += benchmark_step_profit - u;
            regret
        })
        .collect()
}

/// Steps at which regret curves are reported: every step up to 1000, then
/// every 1000th, plus the last.
pub fn is_checkpoint(t: u64, horizon: u64) -> bool {
    t <= 1000 || t.is_multiple_of(1000) || t == horizon
}

const ADV_GRID_STEP: f64 = 1e-3;
const ADV_EDGE: f64 = 1e-6;

/// Realized profit of one side as a function of its price, over a stream of
/// `(belief on that side, wealth)` pairs.
struct RealizedSide {
    g: f64,
    grid: Vec<f64>,
    sums: Vec<f64>,
}

impl RealizedSide {
    fn new(g: f64) -> Self {
        let (lo, hi) = (g + ADV_EDGE, 1.0 - ADV_EDGE);
        let n = ((hi - lo) / ADV_GRID_STEP).floor() as usize;
        let mut grid: Vec<f64> = (0..=n).map(|k| lo + k as f64 * ADV_GRID_STEP).collect();
        grid.push(hi);
        let sums = vec![0.0; grid.len()];
        Self { g, grid, sums }
    }

    fn term(&self, x: f64, belief: f64, wealth: f64) -> f64 {
        margin_r(x, self.g) * (belief - x).max(0.0) * wealth
    }

    fn add(&mut self, belief: f64, wealth: f64) {
        for k in 0..self.grid.len() {
            let x = self.grid[k];
            if x >= belief {
                break;
            }
            self.sums[k] += self.term(x, belief, wealth);
        }
    }

    /// Grid maximum refined by a parabola through the best point and its
    /// neighbours. Never below zero, the value as the price tends to 1.
    fn approx_max(&self) -> f64 {
        let (k, &best) =
            self.sums.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).expect("grid is non-empty");
        if k == 0 || k + 1 == self.sums.len() {
            return best.max(0.0);
        }
        let (l, r) = (self.sums[k - 1], self.sums[k + 1]);
        let curvature = l - 2.0 * best + r;
        let refined = if curvature < 0.0 { best - (r - l).powi(2) / (8.0 * curvature) } else { best };
        refined.max(best).max(0.0)
    }

    fn best_grid_bracket(&self) -> (f64, f64) {
        let k = self
            .sums
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .map(|(k, _)| k)
            .expect("grid is non-empty");
        let lo = self.grid[k.saturating_sub(1)];
        let hi = self.grid[(k + 1).min(self.grid.len() - 1)];
        (lo, hi)
    }
}

/// Adversarial regret curve at the checkpoints of [`is_checkpoint`]: the best
/// fixed prices in hindsight on realized beliefs and wealths, minus realized
/// profit at the prices actually quoted.
///
/// The hindsight maximum is taken per side on a 1e-3 grid with parabolic
/// refinement; [`adversarial_regret`] polishes it exactly at the horizon.
pub fn adversarial_regret_series(records: &[StepRecord], g: f64) -> Vec<(u64, f64)> {
    let horizon = records.last().map_or(0, |r| r.t);
    let mut r_side = RealizedSide::new(g);
    let mut l_side = RealizedSide::new(1.0 - g);
    let mut achieved = 0.0;
    let mut out = Vec::new();
    for rec in records {
        let q = 1.0 - rec.belief;
        r_side.add(rec.belief, rec.wealth);
        l_side.add(q, rec.wealth);
        achieved += r_side.term(rec.a, rec.belief, rec.wealth) + l_side.term(rec.b, q, rec.wealth);
        if is_checkpoint(rec.t, horizon) {
            out.push((rec.t, r_side.approx_max() + l_side.approx_max() - achieved));
        }
    }
    out
}

/// Adversarial regret at the end of the trajectory, with the hindsight
/// maximum polished by golden-section search over the whole history.
pub fn adversarial_regret(records: &[StepRecord], g: f64) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let mut r_side = RealizedSide::new(g);
    let mut l_side = RealizedSide::new(1.0 - g);
    let mut achieved = 0.0;
    for rec in records {
        let q = 1.0 - rec.belief;
        r_side.add(rec.belief, rec.wealth);
        l_side.add(q, rec.wealth);
        achieved += r_side.term(rec.a, rec.belief, rec.wealth) + l_side.term(rec.b, q, rec.wealth);
    }
    let polish = |side: &RealizedSide, belief_of: &dyn Fn(&StepRecord) -> f64| {
        let (lo, hi) = side.best_grid_bracket();
        let total = |x: f64| records.iter().map(|r| side.term(x, belief_of(r), r.wealth)).sum::<f64>();
        let (_, v) = golden_max(total, lo, hi, 1e-9);
        v.max(side.sums.iter().copied().fold(0.0, f64::max))
    };
    let best_r = polish(&r_side, &|r| r.belief);
    let best_l = polish(&l_side, &|r| 1.0 - r.belief);
    best_r + best_l - achieved
}

/// Least-squares slope of `ln r` against `ln t` over the last decade of a
/// regret curve given as `(t, r)` points.
pub fn regret_rate_fit_points(points: &[(u64, f64)]) -> Result<f64, MetricsError> {
    const MIN_HORIZON: u64 = 1000;
    let horizon = points.last().map_or(0, |p| p.0);
    if horizon < MIN_HORIZON {
        return Err(MetricsError::SeriesTooShort { len: horizon as usize, min: MIN_HORIZON as usize });
    }
    let start = horizon / 10;
    let tail: Vec<(f64, f64)> =
        points.iter().filter(|p| p.0 >= start.max(1)).map(|&(t, r)| (t as f64, r)).collect();
    if tail.iter().any(|p| p.1 <= 0.0) {
        return Err(MetricsError::DegenerateSeries);
    }
    let n = tail.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = tail.iter().map(|p| (p.0.ln(), p.1.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// [`regret_rate_fit_points`] for a curve with one entry per step, `t = 1, 2, …`.
pub fn regret_rate_fit(series: &[f64]) -> Result<f64, MetricsError> {
    let points: Vec<(u64, f64)> = series.iter().enumerate().map(|(k, &r)| (k as u64 + 1, r)).collect();
    regret_rate_fit_points(&points)
}
