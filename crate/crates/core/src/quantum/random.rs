//! Seeded random states for tests and audits.

use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{c, CMat, CVec};
use super::state::{BipartitePureState, DensityMatrix};

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, r: usize, k: usize) -> CMat {
    CMat::from_fn(r, k, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random pure state on `dim_a (x) dim_b`.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim_a: usize, dim_b: usize) -> BipartitePureState {
    let v = gaussian_vector(rng, dim_a * dim_b);
    let n = v.norm();
    BipartitePureState::new(dim_a, dim_b, v.unscale(n)).expect("normalized")
}

/// `G G^dagger / Tr` with `G` a `dim x rank` Gaussian matrix.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, dim, rank.max(1));
    DensityMatrix::normalized(&g * g.adjoint()).expect("PSD with positive trace")
}

/// Random probability vector of length `n` (normalized exponentials).
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}
