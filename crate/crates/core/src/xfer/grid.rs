//! Frequency grid for sampled checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dmat::eig::eigenvalues;
use crate::dmat::CMat;

pub const GRID_SEED: u64 = 0x5eed_f4e9;
const LOG_POINTS: usize = 200;
const RANDOM_POINTS: usize = 56;

/// Grid with the default seed.
pub fn frequency_grid(a: &CMat) -> Vec<f64> {
    frequency_grid_seeded(a, GRID_SEED)
}

/// 200 log-spaced ω in [1e-3, 1e3] (scaled by the spectral radius of `a`
/// when it exceeds 1), their negatives, ω = 0 and 56 seeded random points
/// over the same band with random sign.
pub fn frequency_grid_seeded(a: &CMat, seed: u64) -> Vec<f64> {
    let radius = eigenvalues(a).map(|ev| ev.iter().map(|l| l.norm()).fold(0.0, f64::max)).unwrap_or(1.0);
    let scale = radius.max(1.0);
    let mut out = Vec::with_capacity(2 * LOG_POINTS + 1 + RANDOM_POINTS);
    for k in 0..LOG_POINTS {
        let e = -3.0 + 6.0 * k as f64 / (LOG_POINTS - 1) as f64;
        let w = scale * 10f64.powf(e);
        out.push(w);
        out.push(-w);
    }
    out.push(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_POINTS {
        let e: f64 = rng.random_range(-3.0..3.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        out.push(sign * scale * 10f64.powf(e));
    }
    out
}
