//! Shared inputs for the benchmarks.

use bookie_core::{BeliefDistribution, BettorDraw};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// `n` unit-wealth bettors drawn from `dist`, reproducibly.
pub fn draws(dist: &BeliefDistribution, n: usize, seed: u64) -> Vec<BettorDraw> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..n).map(|_| BettorDraw::new(dist.sample(&mut rng), 1.0).unwrap()).collect()
}
