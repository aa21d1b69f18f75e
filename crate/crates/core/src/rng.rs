//! Seed derivation and complex Gaussian sampling.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded through
//! [`derive_seed`], so a stream is identified by a tuple of integers rather than
//! by its position in some shared generator. This is what lets candidate
//! evaluation and Monte-Carlo trials run in any order without changing results.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SimRng = ChaCha8Rng;

/// Stream tags, kept distinct so that adding a consumer never shifts another
/// consumer's draws.
pub mod stream {
    pub const CANDIDATE: u64 = 0x01;
    pub const CANDIDATE_ENV: u64 = 0x02;
    pub const INIT_ENV: u64 = 0x03;
    pub const INIT_CODE: u64 = 0x04;
    pub const TRIAL: u64 = 0x10;
    pub const BASELINE_ENV: u64 = 0x11;
    pub const RANDOM_CODE: u64 = 0x12;
    pub const TRAINER: u64 = 0x13;
    pub const RESTART: u64 = 0x14;
    pub const ENVIRONMENT: u64 = 0x15;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of integers into a child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn derived_rng(master: u64, path: &[u64]) -> SimRng {
    rng_from_seed(derive_seed(master, path))
}

/// One draw from CN(0, variance): real and imaginary parts independent with
/// variance `variance / 2` each.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// Uniform phase on [0, 2π) as a unit complex number.
pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(1.0, phi)
}
