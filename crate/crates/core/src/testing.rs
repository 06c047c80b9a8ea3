//! Random algebra specs for property tests.
//!
//! Every weight is a multiple of `1/D` for a random `D ≤ max_den`, so the
//! arithmetic stays small while still hitting boundary equalities often.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{AlgebraSpec, DiffuseSummand, GeometricBlock, MatrixBlock, ModularDescriptor};
use crate::rational::Rational;

/// `k` positive integers summing to `total` (requires `total ≥ k`).
fn composition<R: Rng + ?Sized>(rng: &mut R, total: i64, k: usize) -> Vec<i64> {
    assert!(k >= 1 && total >= k as i64);
    let mut cuts: Vec<i64> = (1..total).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<i64> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        out.push(c - prev);
        prev = c;
    }
    out
}

/// `ℂ_{α_1} ⊕ … ⊕ ℂ_{α_k}` with `k` drawn from `atoms` and masses
/// with a common denominator at most `max_den`.
pub fn random_abelian<R: Rng + ?Sized>(
    rng: &mut R,
    atoms: std::ops::RangeInclusive<usize>,
    max_den: i64,
) -> AlgebraSpec {
    let k = rng.random_range(atoms);
    let den = rng.random_range((k as i64).max(2)..=max_den.max(k as i64));
    let masses: Vec<Rational> = composition(rng, den, k)
        .into_iter()
        .map(|c| Rational::new(c, den))
        .collect();
    AlgebraSpec::abelian("random", &masses).expect("composition sums to 1")
}

/// A spec mixing scalar atoms, matrix blocks (tracial or not), geometric
/// blocks and diffuse summands of every modular kind.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, max_den: i64) -> AlgebraSpec {
    let parts = rng.random_range(1..=4usize);
    let den = rng.random_range(12.max(parts as i64)..=max_den.max(12));
    let chunks = composition(rng, den, parts);
    let mut blocks = Vec::new();
    let mut geometric = Vec::new();
    let mut diffuse = Vec::new();
    for c in chunks {
        let mass = Rational::new(c, den);
        match rng.random_range(0..10u32) {
            0..=3 => blocks.push(MatrixBlock::new(vec![mass]).unwrap()),
            4..=5 => {
                let d = rng.random_range(2..=3usize);
                blocks.push(MatrixBlock::tracial(d, mass).unwrap());
            }
            6 if c >= 2 => {
                let d = rng.random_range(2..=(c as usize).min(3));
                let weights = composition(rng, c, d)
                    .into_iter()
                    .map(|w| Rational::new(w, den))
                    .collect();
                blocks.push(MatrixBlock::new(weights).unwrap());
            }
            7 => {
                let ratio = Rational::new(1, rng.random_range(2..=5));
                geometric.push(GeometricBlock::new(mass, ratio).unwrap());
            }
            _ => {
                let modular = match rng.random_range(0..3u32) {
                    0 => ModularDescriptor::Tracial,
                    1 => ModularDescriptor::Cyclic(Rational::new(rng.random_range(1..=3), rng.random_range(4..=9))),
                    _ => ModularDescriptor::Dense,
                };
                diffuse.push(DiffuseSummand {
                    weight: mass,
                    modular,
                    hyperfinite: rng.random_bool(0.7),
                });
            }
        }
    }
    AlgebraSpec::new("random", blocks, geometric, diffuse).expect("chunks sum to 1")
}
