//! Deterministic random profile generators shared by the verification
//! suites, the multi-start optimizer and the tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grid::RadialGrid;
use crate::profile::RadialProfile;
use crate::young::YoungFamily;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable per-start sub-seed (splitmix64 step).
pub fn sub_seed(seed: u64, idx: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e3779b97f4a7c15)
        .wrapping_add(idx.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Non-negative, non-decreasing interior values from uniform increments:
/// a random base plus a random-slope cumulative sum, scaled by `amp`.
pub fn random_k_values(len: usize, rng: &mut ChaCha8Rng, amp: f64) -> Vec<f64> {
    let base = rng.gen_range(0.0..0.5) * amp;
    let step = amp * rng.gen_range(0.3..1.5) / len as f64;
    let mut acc = base;
    (0..len)
        .map(|_| {
            acc += rng.gen_range(0.0..2.0) * step;
            acc
        })
        .collect()
}

/// Random cone member, Neumann-closed.
pub fn random_k_profile(
    grid: &RadialGrid,
    fam: &YoungFamily,
    rng: &mut ChaCha8Rng,
    amp: f64,
) -> Result<RadialProfile> {
    let interior = random_k_values(grid.interior_len, rng, amp);
    grid.neumann_closure(&RadialProfile::new(interior), fam)
}

/// Random monotone zero-mean interior values, the raw material the Σ
/// projection feeds on.
pub fn random_monotone_zero_mean(grid: &RadialGrid, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = grid.interior_len;
    let mut values = random_k_values(len, rng, 1.0);
    let w_total: f64 = grid.ball_weights.iter().sum();
    let mean: f64 = grid
        .ball_weights
        .iter()
        .zip(&values)
        .map(|(&w, &v)| w * v)
        .sum::<f64>()
        / w_total;
    for v in values.iter_mut() {
        *v -= mean;
    }
    values
}
