//! Seeded, platform-independent randomness.
//!
//! All sampling goes through ChaCha8 so a recorded seed reproduces an
//! instance bit for bit on any machine. Fuzz trials use a separate ChaCha
//! stream per trial index, which keeps results independent of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matrix::{ComplexMatrix, C64};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `index` of a campaign seeded with `master`.
pub fn trial(master: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Seed for the `attempt`-th retry of a draw that started from `seed`.
pub fn derived_seed(seed: u64, attempt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard complex Gaussian `(x + i y)/√2`.
pub fn complex_gaussian(rng: &mut Rng) -> C64 {
    let x: f64 = StandardNormal.sample(rng);
    let y: f64 = StandardNormal.sample(rng);
    C64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of independent standard complex Gaussians, filled row by row.
pub fn ginibre(rng: &mut Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}
