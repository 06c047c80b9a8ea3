//! Haar-distributed unitaries and isometries.

use faer::{c64, Mat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// `n × k` matrix of i.i.d. standard complex Gaussians, `E|z|² = 1`.
pub fn ginibre(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Mat<c64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut draw = || -> f64 { StandardNormal.sample(rng) };
    let mut m = Mat::<c64>::zeros(n, k);
    for j in 0..k {
        for i in 0..n {
            let re = draw();
            let im = draw();
            m[(i, j)] = c64::new(re * scale, im * scale);
        }
    }
    m
}

/// The first `k` columns of a Haar unitary of size `n`, i.e. a uniformly
/// random isometry `ℂ^k → ℂ^n`. Deterministic in `(n, k, seed)`.
///
/// QR of a Gaussian matrix with each column of `Q` multiplied by the phase
/// of the matching diagonal entry of `R`, which removes the bias of the
/// factorization's sign convention.
pub fn haar_isometry(n: usize, k: usize, seed: u64) -> Mat<c64> {
    assert!(k <= n && n >= 1, "need 1 ≤ n and k ≤ n");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(n, k, &mut rng);
    let qr = g.qr();
    let mut q = qr.compute_thin_Q();
    let r = qr.thin_R();
    for j in 0..k {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { c64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary(n: usize, seed: u64) -> Mat<c64> {
    haar_isometry(n, n, seed)
}
