//! Poisson moment functional and its relatives: the set-partition moment
//! formula φ_ω(λ(x_1)…λ(x_n)) = Σ_{σ∈P(n)} Π_{A∈σ} ω(∏→_{i∈A} x_i), the
//! characteristic functional exp(ω(e^{ix}−1)), the finite-n tensor-power
//! approximants that converge to it at rate O(1/n), and the growth bound
//! |φ| ≤ |P(n)|·Π|||x_i|||.

use crate::algebra::{triple_norm, AlgebraElement, Weight};
use crate::error::{Error, Result};
use crate::partitions::{bell, enumerate_partitions, SetPartition};
use crate::scalar::{cre, Real, C};

/// Word-length cap: Bell(8) = 4140 partitions keeps a single moment well
/// under a second.
pub const MAX_WORD_LEN: usize = 8;

/// A weight together with an ordered word of algebra elements, the argument
/// of φ_ω(λ(x_1)…λ(x_n)).
#[derive(Clone, Debug)]
pub struct MomentQuery<'a, T> {
    pub weight: &'a Weight<T>,
    pub factors: Vec<AlgebraElement<T>>,
}

impl<'a, T: Real> MomentQuery<'a, T> {
    pub fn new(weight: &'a Weight<T>, factors: Vec<AlgebraElement<T>>) -> Result<Self> {
        if factors.len() > MAX_WORD_LEN {
            return Err(Error::CapExceeded(format!(
                "moment word length {} exceeds cap {MAX_WORD_LEN}",
                factors.len()
            )));
        }
        for f in &factors {
            weight.algebra().check_element(f)?;
        }
        Ok(MomentQuery { weight, factors })
    }
}

/// Ordered product ∏→_{i∈A} x_i over a block (ascending indices), then ω.
fn block_value<T: Real>(
    w: &Weight<T>,
    factors: &[AlgebraElement<T>],
    block: &[usize],
) -> C<T> {
    let mut prod = factors[block[0]].clone();
    for &i in &block[1..] {
        prod = prod.mul(&factors[i]);
    }
    w.eval(&prod).expect("factors checked against the weight's algebra")
}

fn partition_term<T: Real>(
    w: &Weight<T>,
    factors: &[AlgebraElement<T>],
    sigma: &SetPartition,
) -> C<T> {
    sigma
        .blocks()
        .iter()
        .fold(cre(T::one()), |acc, b| acc * block_value(w, factors, b))
}

/// φ_ω(λ(x_1)…λ(x_n)): the exact partition sum. The empty word gives 1.
pub fn poisson_moment<T: Real>(q: &MomentQuery<T>) -> Result<C<T>> {
    let n = q.factors.len();
    if n == 0 {
        return Ok(cre(T::one()));
    }
    let mut total = C::new(T::zero(), T::zero());
    for sigma in enumerate_partitions(n)? {
        total += partition_term(q.weight, &q.factors, &sigma);
    }
    Ok(total)
}

/// φ_ω(e^{iλ(x)}) = exp(ω(e^{ix} − 1)) for Hermitian x. Modulus ≤ 1.
pub fn characteristic<T: Real>(w: &Weight<T>, x: &AlgebraElement<T>) -> Result<C<T>> {
    w.algebra().check_element(x)?;
    let u = x.exp_i()?;
    Ok(w.eval_minus_identity(&u)?.exp())
}

/// Finite-n Bernoulli approximant of the Poisson moment:
/// Σ_{σ, |σ|≤n} |σ|!·C(n,|σ|)·n^{−|σ|}·Π_{A∈σ} ω(∏→ x_i).
/// Converges to `poisson_moment` at rate O(1/n_copies).
pub fn bernoulli_moment<T: Real>(q: &MomentQuery<T>, n_copies: u64) -> Result<C<T>> {
    if n_copies == 0 {
        return Err(Error::OutOfRange("bernoulli approximant needs n_copies ≥ 1".into()));
    }
    let n = q.factors.len();
    if n == 0 {
        return Ok(cre(T::one()));
    }
    let mut total = C::new(T::zero(), T::zero());
    for sigma in enumerate_partitions(n)? {
        let k = sigma.num_blocks() as u64;
        if k > n_copies {
            continue;
        }
        // |σ|!·C(n,|σ|)/n^{|σ|} = ∏_{i<|σ|} (n−i)/n
        let mut coeff = T::one();
        for i in 0..k {
            coeff = coeff * T::of((n_copies - i) as f64) / T::of(n_copies as f64);
        }
        total += partition_term(q.weight, &q.factors, &sigma).scale(coeff);
    }
    Ok(total)
}

/// Outcome of the growth-bound check |φ_ω(λ(x_1)…λ(x_n))| ≤ B(n)·Π|||x_i|||.
#[derive(Clone, Debug)]
pub struct GrowthReport<T> {
    pub moment_abs: T,
    pub bound: T,
    pub pass: bool,
}

/// Evaluate the moment and the partition-count bound; `pass` must hold for
/// every word.
pub fn growth_bound_check<T: Real>(q: &MomentQuery<T>) -> Result<GrowthReport<T>> {
    let n = q.factors.len();
    let moment_abs = poisson_moment(q)?.norm();
    let mut bound = T::of(bell(n)? as f64);
    for x in &q.factors {
        bound *= triple_norm(q.weight, x)?;
    }
    // tiny float headroom: the two sides traverse different arithmetic
    let pass = moment_abs <= bound * T::of(1.0 + 1e-12) + T::of(1e-12);
    Ok(GrowthReport { moment_abs, bound, pass })
}

/// Classical Poisson probability e^{−λ}λ^k/k!.
pub fn classical_pmf<T: Real>(lambda0: T, k: u32) -> Result<T> {
    if lambda0 <= T::zero() {
        return Err(Error::OutOfRange("intensity λ₀ must be positive".into()));
    }
    let mut log_p = -lambda0 + T::of(k as f64) * lambda0.ln();
    for j in 1..=k {
        log_p -= T::of(j as f64).ln();
    }
    Ok(log_p.exp())
}
