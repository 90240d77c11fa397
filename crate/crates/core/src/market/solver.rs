use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{foc_residual_l, foc_residual_r, profit_l, profit_r, MarketError, Prices};
use crate::beliefs::BeliefDistribution;
use crate::numeric::{brent_root, golden_max};

/// Distance kept from `g` and from 1 when searching for unfair-odds optima.
const EDGE: f64 = 1e-6;
const GRID_STEP: f64 = 1e-3;
const POLISH_TOL: f64 = 1e-7;
/// Local maxima closer than this are the same point.
const MERGE_DIST: f64 = 1e-5;
const MAX_PER_SIDE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    /// 1e-3 grid over the search box, then golden-section polish.
    GridThenPolish,
    /// Bracketed roots of the first-order residuals.
    FocRoots,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maximiser {
    pub prices: Prices,
    pub profit: f64,
    pub is_global: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    R,
    L,
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Side::R => "R",
            Side::L => "L",
        }
    }
}

/// One side of the separable profit: its term, residual and search window.
struct SideProblem<'a> {
    dist: &'a BeliefDistribution,
    g: f64,
    side: Side,
}

impl SideProblem<'_> {
    fn bounds(&self) -> (f64, f64) {
        let start = match self.side {
            Side::R => self.g,
            Side::L => 1.0 - self.g,
        };
        (start + EDGE, 1.0 - EDGE)
    }

    fn profit(&self, x: f64) -> f64 {
        match self.side {
            Side::R => profit_r(self.dist, self.g, x),
            Side::L => profit_l(self.dist, self.g, x),
        }
    }

    fn residual(&self, x: f64) -> Option<f64> {
        match self.side {
            Side::R => foc_residual_r(self.dist, self.g, x).ok(),
            Side::L => foc_residual_l(self.dist, self.g, x).ok(),
        }
    }

    fn grid(&self, step: f64) -> Vec<f64> {
        let (lo, hi) = self.bounds();
        let n = ((hi - lo) / step).floor() as usize;
        let mut xs: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).collect();
        if xs.last().is_some_and(|&x| hi - x > 1e-12) {
            xs.push(hi);
        }
        xs
    }

    fn grid_maxima(&self) -> Vec<(f64, f64)> {
        let (lo, hi) = self.bounds();
        let xs = self.grid(GRID_STEP);
        let vs: Vec<f64> = xs.par_iter().map(|&x| self.profit(x)).collect();
        let n = xs.len();
        let mut found = Vec::new();
        for k in 0..n {
            let left = if k > 0 { vs[k - 1] } else { f64::NEG_INFINITY };
            let right = if k + 1 < n { vs[k + 1] } else { f64::NEG_INFINITY };
            let peak = vs[k] >= left && vs[k] >= right && (vs[k] > left || vs[k] > right);
            if !peak || vs[k] <= 0.0 {
                continue;
            }
            let l = if k > 0 { xs[k - 1] } else { lo };
            let r = if k + 1 < n { xs[k + 1] } else { hi };
            let (x, v) = golden_max(|x| self.profit(x), l, r, POLISH_TOL);
            found.push(if v >= vs[k] { (x, v) } else { (xs[k], vs[k]) });
        }
        merge(found)
    }

    fn root_maxima(&self, step: f64) -> Vec<(f64, f64)> {
        let (lo, hi) = self.bounds();
        let xs = self.grid(step);
        let rs: Vec<Option<f64>> = xs.par_iter().map(|&x| self.residual(x)).collect();
        let mut found = Vec::new();
        for k in 0..xs.len().saturating_sub(1) {
            let (Some(r0), Some(r1)) = (rs[k], rs[k + 1]) else { continue };
            if r0 == 0.0 || r0.signum() == r1.signum() {
                continue;
            }
            let residual = |x: f64| self.residual(x).unwrap_or(f64::NAN);
            let Some(x) = brent_root(residual, xs[k], xs[k + 1], 1e-12) else { continue };
            let h = 1e-4_f64.min(x - lo).min(hi - x);
            let curvature = self.profit(x + h) + self.profit(x - h) - 2.0 * self.profit(x);
            let value = self.profit(x);
            if curvature < 0.0 && value > 0.0 {
                found.push((x, value));
            }
        }
        merge(found)
    }

    fn roots(&self, step: f64) -> Vec<f64> {
        let xs = self.grid(step);
        let rs: Vec<Option<f64>> = xs.par_iter().map(|&x| self.residual(x)).collect();
        let mut roots = Vec::new();
        let mut last: Option<(f64, f64)> = None;
        for (&x, r) in xs.iter().zip(rs) {
            let Some(r) = r else { continue };
            if r == 0.0 {
                continue;
            }
            if let Some((x0, r0)) = last {
                if r0.signum() != r.signum() {
                    let residual = |x: f64| self.residual(x).unwrap_or(f64::NAN);
                    roots.push(brent_root(residual, x0, x, 1e-12).unwrap_or(0.5 * (x0 + x)));
                }
            }
            last = Some((x, r));
        }
        roots
    }
}

fn merge(mut points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    points.sort_by(|p, q| q.1.total_cmp(&p.1));
    let mut kept: Vec<(f64, f64)> = Vec::new();
    for p in points {
        if kept.iter().all(|k| (k.0 - p.0).abs() > MERGE_DIST) {
            kept.push(p);
        }
    }
    kept.truncate(MAX_PER_SIDE);
    kept
}

/// All local maximisers of expected profit with non-zero overround, best
/// first. The best carries `is_global`.
///
/// Profit separates into an `a` term and a `b` term, so each side is searched
/// on its own window `[g + ε, 1 - ε]` / `[1 - g + ε, 1 - ε]` and every pair of
/// side maxima is a local maximiser of the whole.
pub fn solve_optimal_prices(
    dist: &BeliefDistribution,
    g: f64,
    method: SolveMethod,
) -> Result<Vec<Maximiser>, MarketError> {
    let side = |side| SideProblem { dist, g, side };
    let (r, l) = (side(Side::R), side(Side::L));
    let find = |p: &SideProblem| match method {
        SolveMethod::GridThenPolish => p.grid_maxima(),
        SolveMethod::FocRoots => p.root_maxima(GRID_STEP / 10.0),
    };
    let r_max = find(&r);
    let l_max = find(&l);
    if r_max.is_empty() {
        return Err(MarketError::NoMaximiser { side: r.side.name() });
    }
    if l_max.is_empty() {
        return Err(MarketError::NoMaximiser { side: l.side.name() });
    }
    let mut out = Vec::with_capacity(r_max.len() * l_max.len());
    for &(a, ua) in &r_max {
        for &(b, ub) in &l_max {
            out.push(Maximiser { prices: Prices::new(a, b)?, profit: ua + ub, is_global: false });
        }
    }
    out.sort_by(|x, y| y.profit.total_cmp(&x.profit));
    out[0].is_global = true;
    let best = out[0].prices;
    let on_edge = |x: f64, (lo, hi): (f64, f64)| x - lo < EDGE || hi - x < EDGE;
    if on_edge(best.a(), r.bounds()) || on_edge(best.b(), l.bounds()) {
        return Err(MarketError::NoInteriorMax { a: best.a(), b: best.b() });
    }
    Ok(out)
}

/// Sign-change roots of `Υ^R` on `(g, 1)` scanned at `grid_step`.
pub fn foc_roots(dist: &BeliefDistribution, g: f64, grid_step: f64) -> Vec<f64> {
    SideProblem { dist, g, side: Side::R }.roots(grid_step)
}

/// Sign-change roots of `Υ^L` on `(1 - g, 1)` scanned at `grid_step`.
pub fn foc_roots_l(dist: &BeliefDistribution, g: f64, grid_step: f64) -> Vec<f64> {
    SideProblem { dist, g, side: Side::L }.roots(grid_step)
}

/// Number of sign changes of `Υ^R` on `(g, 1)`; one means a unique maximiser.
pub fn count_foc_roots(dist: &BeliefDistribution, g: f64, grid_step: f64) -> usize {
    foc_roots(dist, g, grid_step).len()
}

/// Profit-maximising fair price given the crowd's mean belief:
/// `√(gp) / (√(gp) + √((1-g)(1-p)))`.
pub fn solve_fair_optimal(mean_belief: f64, g: f64) -> f64 {
    let up = (g * mean_belief).sqrt();
    let down = ((1.0 - g) * (1.0 - mean_belief)).sqrt();
    up / (up + down)
}
