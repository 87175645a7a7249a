//! Lindblad relative entropy of weights, its realization on the truncated
//! Poisson structure, and the cocycle lift that connects the two.
//!
//! The closed form is D_Lin(ρ|ψ) = Tr(ρ(log ρ − log ψ)) + Tr ψ − Tr ρ. On
//! the truncated direct sum ⊕_{m≤M} N^{⊗m} the two Poisson states have
//! explicit densities D_φ = e^{−φ(1)} ⊕_m d_φ^{⊗m}/m!; after renormalizing
//! by the truncated traces, their Umegaki relative entropy is evaluated
//! level by level through log(d^{⊗m}) = Σ_j π_j(log d) and converges to
//! D_Lin as M → ∞.

use crate::algebra::{connes_cocycle, AlgebraElement, Weight};
use crate::error::{Error, Result};
use crate::gns::{adaptive_cap, GnsContext, PoissonWord, WordKind};
use crate::scalar::{cre, Real};

const DOMINATION_TOL: f64 = 1e-12;
const LOG_FLOOR: f64 = 1e-300;

/// Tr(d_ρ log d_ρ) via the density eigenvalues.
fn self_entropy_term<T: Real>(rho: &Weight<T>) -> T {
    let mut acc = T::zero();
    for (lam, _) in rho.density_eig() {
        for &l in lam {
            let guarded = l.max(T::of(LOG_FLOOR));
            acc += l * guarded.ln();
        }
    }
    acc
}

/// Tr(d_ρ log d_ψ) via the blockwise spectral logarithm of d_ψ.
fn cross_entropy_term<T: Real>(rho: &Weight<T>, psi: &Weight<T>) -> Result<T> {
    let log_psi = psi
        .density()
        .func_hermitian(|l| cre(l.max(T::of(LOG_FLOOR)).ln()));
    Ok(rho.eval(&log_psi)?.re)
}

/// D_Lin(ρ|ψ) = Tr(ρ(log ρ − log ψ)) + Tr ψ − Tr ρ.
pub fn lindblad_entropy<T: Real>(rho: &Weight<T>, psi: &Weight<T>) -> Result<T> {
    if rho.algebra() != psi.algebra() {
        return Err(Error::DimensionMismatch("entropy weights live on different algebras".into()));
    }
    Ok(self_entropy_term(rho) - cross_entropy_term(rho, psi)? + psi.mass() - rho.mass())
}

/// True iff d_ψ − d_ρ is positive semidefinite.
pub fn check_domination<T: Real>(rho: &Weight<T>, psi: &Weight<T>) -> Result<bool> {
    if rho.algebra() != psi.algebra() {
        return Err(Error::DimensionMismatch("domination check needs one algebra".into()));
    }
    let gap = psi.density().sub(rho.density());
    let min = gap
        .blocks
        .iter()
        .map(|b| b.hermitize().min_eig_hermitian())
        .fold(T::infinity(), |a, b| a.min(b));
    Ok(min >= -T::of(DOMINATION_TOL))
}

/// Truncated Poisson relative entropy at level cap M: the Umegaki relative
/// entropy of the renormalized truncated densities on ⊕_{m≤M} N^{⊗m}.
pub fn poisson_relative_entropy<T: Real>(
    rho: &Weight<T>,
    psi: &Weight<T>,
    m_cap: usize,
) -> Result<T> {
    if !check_domination(rho, psi)? {
        let gap = psi.density().sub(rho.density());
        let min = gap
            .blocks
            .iter()
            .map(|b| b.hermitize().min_eig_hermitian())
            .fold(T::infinity(), |a, b| a.min(b));
        return Err(Error::NotDominated(min.to_f64_lossy()));
    }
    if m_cap > 10_000 {
        return Err(Error::CapExceeded("entropy truncation cap is 10000 levels".into()));
    }
    let t_rho = rho.mass().to_f64_lossy();
    let t_psi = psi.mass().to_f64_lossy();
    // truncated traces Z_φ = e^{−t_φ} Σ_{m≤M} t_φ^m/m!
    let partial = |t: f64| -> f64 {
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for m in 1..=m_cap {
            term *= t / m as f64;
            sum += term;
        }
        (-t).exp() * sum
    };
    let z_rho = partial(t_rho);
    let z_psi = partial(t_psi);
    let s_diff = (self_entropy_term(rho) - cross_entropy_term(rho, psi)?).to_f64_lossy();
    // level-by-level: the scalar offsets weighted by the ρ̂ level masses,
    // plus the operator part m·t_ρ^{m−1}·Tr(d_ρ(log d_ρ − log d_ψ))/m!
    let offset = (t_psi - t_rho) + (z_psi / z_rho).ln();
    let mut value = 0.0f64;
    let mut level_mass = (-t_rho).exp() / z_rho; // e^{−t_ρ} t_ρ^m/(m! Z_ρ) at m = 0
    let mut deriv_mass = (-t_rho).exp() / z_rho; // e^{−t_ρ} t_ρ^{m−1}/((m−1)! Z_ρ) at m = 1
    value += level_mass * offset;
    for m in 1..=m_cap {
        level_mass *= t_rho / m as f64;
        value += level_mass * offset + deriv_mass * s_diff;
        deriv_mass *= t_rho / m as f64;
    }
    Ok(T::of(value))
}

/// Row of the convergence table: the truncated value at one level cap and
/// its gap to the closed form.
#[derive(Clone, Debug)]
pub struct EntropyRow<T> {
    pub level: usize,
    pub value: T,
    pub gap: T,
}

/// Lindblad value, truncation sweep, and masses.
#[derive(Clone, Debug)]
pub struct EntropyReport<T> {
    pub lindblad: T,
    pub rho_mass: T,
    pub psi_mass: T,
    pub rows: Vec<EntropyRow<T>>,
}

impl<T: Real> EntropyReport<T> {
    /// Gaps must decrease beyond a burn-in level (⌈5·max mass⌉).
    pub fn gaps_decreasing(&self) -> bool {
        let burn_in = (T::of(5.0) * self.rho_mass.max(self.psi_mass)).ceil().to_f64_lossy() as usize;
        let tail: Vec<&EntropyRow<T>> =
            self.rows.iter().filter(|r| r.level >= burn_in).collect();
        tail.windows(2).all(|w| w[1].gap <= w[0].gap + T::of(1e-14))
    }
}

/// Sweep the truncation cap over the given levels.
pub fn poisson_entropy_report<T: Real>(
    rho: &Weight<T>,
    psi: &Weight<T>,
    levels: impl IntoIterator<Item = usize>,
) -> Result<EntropyReport<T>> {
    let lindblad = lindblad_entropy(rho, psi)?;
    let mut rows = Vec::new();
    for level in levels {
        let value = poisson_relative_entropy(rho, psi, level)?;
        rows.push(EntropyRow { level, value, gap: (value - lindblad).abs() });
    }
    Ok(EntropyReport { lindblad, rho_mass: rho.mass(), psi_mass: psi.mass(), rows })
}

/// Residual of the cocycle lift at the word level: Γ(u_t) with
/// u_t = (Dρ:Dψ)_t, paired against a λ_∅ word and the ψ-vacuum, must
/// reproduce exp(ψ(u_t − 1))·Π_i ψ(u_t·x_i).
pub fn cocycle_lift_check<T: Real>(
    rho: &Weight<T>,
    psi: &Weight<T>,
    t: T,
    letters: &[AlgebraElement<T>],
) -> Result<T> {
    if !check_domination(rho, psi)? {
        return Err(Error::NotDominated(f64::NAN));
    }
    let u = connes_cocycle(rho, psi, t)?;
    // closed form from the Γ-action on λ_∅ words
    let mut closed = psi.eval_minus_identity(&u)?.exp();
    for x in letters {
        closed *= psi.eval(&u.mul(x))?;
    }
    // oracle: ⟨Γ(u*)ξ_ψ, λ_∅(x⃗)ξ_ψ⟩ in the truncated GNS space
    let tol = T::of(1e-8);
    let mut prod_norms = T::one();
    for x in letters {
        prod_norms *= x.op_norm().max(T::one());
    }
    let cap = adaptive_cap(psi, tol, letters.len(), prod_norms, psi.algebra().linear_dim())?;
    let ctx = GnsContext::new(psi);
    let left = ctx.gamma_vacuum(&u.adjoint(), cap)?;
    let word = PoissonWord::new(WordKind::LambdaEmpty, letters.to_vec())?;
    let right = ctx.build_word_vector(&word, cap)?;
    let oracle = ctx.inner(&left, &right);
    Ok((closed - oracle).norm())
}
