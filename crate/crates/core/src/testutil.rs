//! Deterministic random instances for unit tests (a tiny splitmix/LCG hybrid
//! so tests stay reproducible without pulling a full RNG into the library).

use crate::algebra::{Algebra, AlgebraElement, Weight};
use crate::linalg::Mat;
use crate::scalar::cre;
use num_complex::Complex64;

pub fn rng_stream(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(0xd1b54a32d192ed03);
    move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    }
}

pub fn random_element(alg: &Algebra, next: &mut impl FnMut() -> f64) -> AlgebraElement<f64> {
    let blocks = alg
        .block_dims()
        .iter()
        .map(|&d| {
            let mut m = Mat::zeros(d);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] = Complex64::new(next(), next());
                }
            }
            m
        })
        .collect();
    AlgebraElement::from_blocks(blocks)
}

pub fn random_hermitian(alg: &Algebra, next: &mut impl FnMut() -> f64) -> AlgebraElement<f64> {
    let x = random_element(alg, next);
    x.add(&x.adjoint()).scale(cre(0.5))
}

/// Hermitian with operator norm ≤ 1.
pub fn random_contraction(alg: &Algebra, next: &mut impl FnMut() -> f64) -> AlgebraElement<f64> {
    let h = random_hermitian(alg, next);
    let n = h.op_norm();
    h.scale(cre(1.0 / (n + 1e-9)))
}

/// Faithful weight with the given mass and a condition-number floor.
pub fn random_weight(alg: &Algebra, mass: f64, next: &mut impl FnMut() -> f64) -> Weight<f64> {
    let g = random_element(alg, next);
    let mut d = g.mul(&g.adjoint());
    // eigenvalue floor keeps the density well conditioned
    let lift = alg.identity::<f64>().scale(cre(0.05 * (d.op_norm() + 0.1)));
    d = d.add(&lift);
    let w = Weight::new(d).expect("g g* + εI is faithful");
    let current = w.mass();
    Weight::new(w.density().scale(cre(mass / current))).expect("rescaled density stays faithful")
}
