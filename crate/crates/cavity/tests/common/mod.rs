#![allow(dead_code)]

use cavity::linalg::{dagger, Mat, C64};
use cavity::model::{DensityMatrix, Space};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random full-rank density matrix on cutoff `m`, supported on levels `0..=support`.
pub fn random_state(rng: &mut impl Rng, m: usize, support: usize) -> DensityMatrix {
    let k = support.min(m) + 1;
    let g = Mat::from_shape_fn((k, k), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let small = g.dot(&dagger(&g));
    let tr: f64 = (0..k).map(|i| small[[i, i]].re).sum();
    let mut full = Mat::zeros((m + 1, m + 1));
    for i in 0..k {
        for j in 0..k {
            full[[i, j]] = small[[i, j]] / tr;
        }
    }
    DensityMatrix::new(full, Space::Cavity).expect("valid random state")
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
