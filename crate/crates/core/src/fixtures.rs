//! Deterministic seeded instance generation: faithful weights, Hermitian
//! contractions, orthogonal centralizer corner pairs, and dominated weight
//! pairs. The same seed always produces the same fixture, byte for byte.

use crate::algebra::{Algebra, AlgebraElement, Weight};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::cre;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixture families the generator understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceKind {
    FaithfulWeight,
    HermitianContraction,
    CornerPair,
    DominatedWeightPair,
}

impl InstanceKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "faithful-weight" => Ok(Self::FaithfulWeight),
            "hermitian-contraction" => Ok(Self::HermitianContraction),
            "corner-pair" => Ok(Self::CornerPair),
            "dominated-weight-pair" => Ok(Self::DominatedWeightPair),
            other => Err(Error::OutOfRange(format!("unknown instance kind {other:?}"))),
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on uniform draws keeps the stream stable across rand versions
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_element(alg: &Algebra, rng: &mut ChaCha8Rng) -> AlgebraElement<f64> {
    let blocks = alg
        .block_dims()
        .iter()
        .map(|&d| {
            let mut m = Mat::zeros(d);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] = Complex64::new(gaussian(rng), gaussian(rng));
                }
            }
            m
        })
        .collect();
    AlgebraElement::from_blocks(blocks)
}

/// Hermitian element with operator norm ≤ 1.
pub fn hermitian_contraction(alg: &Algebra, rng: &mut ChaCha8Rng) -> AlgebraElement<f64> {
    let g = random_element(alg, rng);
    let h = g.add(&g.adjoint()).scale(cre(0.5));
    let n = h.op_norm();
    h.scale(cre(1.0 / (n + 1e-9)))
}

/// Faithful weight with the requested mass and condition number ≤ 100.
pub fn faithful_weight(alg: &Algebra, mass: f64, rng: &mut ChaCha8Rng) -> Weight<f64> {
    let g = random_element(alg, rng);
    let mut d = g.mul(&g.adjoint());
    let top = d
        .blocks
        .iter()
        .map(|b| b.hermitize().eig_hermitian().0.last().copied().unwrap_or(1.0))
        .fold(0.0f64, f64::max);
    // lift the spectrum floor to top/100 so the condition number stays ≤ 100
    d = d.add(&alg.identity::<f64>().scale(cre(top / 99.0 + 1e-9)));
    let w = Weight::new(d).expect("lifted Gram density is faithful");
    Weight::new(w.density().scale(cre(mass / w.mass()))).expect("rescaling keeps faithfulness")
}

/// Orthogonal centralizer corner pair on a weight with diagonal density:
/// returns (weight, e, f, x ∈ eNe Hermitian, y ∈ fNf Hermitian).
#[allow(clippy::type_complexity)]
pub fn corner_pair(
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> (Weight<f64>, AlgebraElement<f64>, AlgebraElement<f64>, AlgebraElement<f64>, AlgebraElement<f64>)
{
    assert!(dim >= 2, "corner pair needs dimension ≥ 2");
    let alg = Algebra::full(dim);
    // diagonal density: every diagonal projection is in the centralizer
    let entries: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = entries.iter().sum();
    let entries: Vec<f64> = entries.iter().map(|e| e / total).collect();
    let w = Weight::diagonal(&entries).expect("positive diagonal");
    let split = rng.gen_range(1..dim);
    let mut e_diag = vec![0.0; dim];
    let mut f_diag = vec![0.0; dim];
    for v in e_diag.iter_mut().take(split) {
        *v = 1.0;
    }
    for v in f_diag.iter_mut().skip(split) {
        *v = 1.0;
    }
    let e = AlgebraElement::from_blocks(vec![Mat::diag_re(&e_diag)]);
    let f = AlgebraElement::from_blocks(vec![Mat::diag_re(&f_diag)]);
    let h = hermitian_contraction(&alg, rng);
    let x = e.mul(&h).mul(&e);
    let h2 = hermitian_contraction(&alg, rng);
    let y = f.mul(&h2).mul(&f);
    (w, e, f, x, y)
}

/// ψ faithful with the requested mass, ρ = ψ − (small PSD): d_ψ − d_ρ ⪰ 0
/// by construction, verified before returning.
pub fn dominated_weight_pair(
    alg: &Algebra,
    mass: f64,
    rng: &mut ChaCha8Rng,
) -> (Weight<f64>, Weight<f64>) {
    let psi = faithful_weight(alg, mass, rng);
    let floor = psi
        .density()
        .blocks
        .iter()
        .map(|b| b.hermitize().min_eig_hermitian())
        .fold(f64::INFINITY, f64::min);
    let g = random_element(alg, rng);
    let mut pert = g.mul(&g.adjoint());
    pert = pert.scale(cre(0.4 * floor / (pert.op_norm() + 1e-12)));
    let rho = Weight::new(psi.density().sub(&pert)).expect("perturbation stays below the floor");
    let ok = crate::entropy::check_domination(&rho, &psi).expect("same algebra");
    assert!(ok, "generator post-check: domination must hold");
    (rho, psi)
}
