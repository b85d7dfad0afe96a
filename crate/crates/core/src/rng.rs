//! Seeding and samplers shared by every Monte Carlo routine.
//!
//! Each trial owns a `ChaCha8Rng` seeded from [`trial_seed`]. The derivation is
//! fixed bit-for-bit so that any single trial can be replayed in isolation:
//!
//! ```text
//! fmix(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!           z ^= z >> 27; z *= 0x94D049BB133111EB;
//!           z ^= z >> 31
//! trial_seed(base, i) = fmix(base + 0x9E3779B97F4A7C15 * (i + 1))   (wrapping u64)
//! ```
//!
//! `fmix` is the SplitMix64 output permutation, a bijection on `u64`, so
//! distinct `(base, i)` pairs along one stream never collide.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type TrialRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn fmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    fmix64(base_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(trial.wrapping_add(1))))
}

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw on `(0, 1]`; used wherever a zero would produce an empty ball.
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Uniform point in the open ball of radius `radius` centred at the origin of `R^n`.
///
/// Direction from a normalised Gaussian vector, radius `radius * U^{1/n}`.
pub fn uniform_in_ball<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    fill_uniform_in_ball(rng, radius, &mut out);
    out
}

/// Allocation-free form of [`uniform_in_ball`]; consumes the same draws.
pub fn fill_uniform_in_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64, out: &mut [f64]) {
    let n = out.len();
    loop {
        for c in out.iter_mut() {
            *c = rng.sample::<f64, _>(StandardNormal);
        }
        let len = crate::vecmath::norm(out);
        if len == 0.0 {
            continue;
        }
        let u: f64 = rng.random();
        let s = radius * u.powf(1.0 / n as f64) / len;
        out.iter_mut().for_each(|c| *c *= s);
        return;
    }
}
