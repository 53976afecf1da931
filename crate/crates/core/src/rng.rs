//! Seeded randomness shared by every Monte Carlo routine.
//!
//! Per-sample generators are derived from `(seed, index)` with a
//! counter-based mix, so results do not depend on how work is split
//! across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

pub type SampleRng = ChaCha12Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child stream of `seed`.
#[inline]
pub fn child_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

pub fn rng_from_seed(seed: u64) -> SampleRng {
    SampleRng::seed_from_u64(seed)
}

pub fn child_rng(seed: u64, index: u64) -> SampleRng {
    rng_from_seed(child_seed(seed, index))
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Uniform point on the unit sphere in R^m (normalized Gaussian vector).
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| standard_normal(rng)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Uniform point in the ball B(center, radius).
pub fn point_in_ball<R: Rng + ?Sized>(rng: &mut R, center: &[f64], radius: f64) -> Vec<f64> {
    let m = center.len();
    let dir = unit_vector(rng, m);
    let u: f64 = rng.gen();
    let r = radius * u.powf(1.0 / m as f64);
    center.iter().zip(&dir).map(|(c, d)| c + r * d).collect()
}

/// Standard complex Gaussian with E|c|^2 = 1.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    num_complex::Complex64::new(s * standard_normal(rng), s * standard_normal(rng))
}
