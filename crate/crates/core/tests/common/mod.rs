#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeezed_fcs::ModelParams;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Γ ∈ [0.1, 5], n ∈ [0.05, 3], x ∈ [0, 2].
pub fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let g = |r: &mut ChaCha8Rng| r.random_range(0.1..=5.0);
    let n = |r: &mut ChaCha8Rng| r.random_range(0.05..=3.0);
    let x = |r: &mut ChaCha8Rng| r.random_range(0.0..=2.0);
    ModelParams::from_occupations((g(rng), g(rng)), (n(rng), n(rng)), (x(rng), x(rng)))
        .expect("valid random parameters")
}

pub fn fig2() -> ModelParams {
    ModelParams::from_occupations((1.0, 1.0), (1.0, 0.1), (0.0, 0.0)).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
