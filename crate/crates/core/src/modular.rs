//! Lifted modular flow on Poisson words, KMS verification through the
//! characteristic functional, the Arveson spectrum of a weight, and the
//! factor-type classifier it determines, together with the principal-series
//! weight helper that feeds it.

use crate::algebra::{modular_flow, modular_flow_analytic, AlgebraElement, ModularData, Weight};
use crate::error::{Error, Result};
use crate::gns::PoissonWord;
use crate::linalg::Mat;
use crate::scalar::Real;
use num_complex::Complex;

/// Classification outcome, with the evidence that produced it.
#[derive(Clone, Debug, PartialEq)]
pub enum TypeClass {
    /// Sp(Δ_ω) = {1}: the stabilized Poisson algebra is the hyperfinite II₁ factor.
    TypeII1,
    /// log-spectrum ⊆ (log λ)·ℤ with λ ∈ (0,1) the largest such generator.
    TypeIIIlambda(f64),
    /// At least two log-spectrum values with no common lattice step.
    TypeIII1,
    /// Lattice detection fell inside the tolerance band; no verdict.
    Indeterminate,
}

/// Classifier output: the verdict plus the log-spectrum generators and the
/// detected lattice step (0 when none).
#[derive(Clone, Debug)]
pub struct TypeReport {
    pub class: TypeClass,
    pub log_spectrum: Vec<f64>,
    pub lattice_step: f64,
}

/// Δ^{it} acts on words letterwise: λ_∅(x⃗) ↦ λ_∅(σ_t(x⃗)), and the same for
/// the other word kinds.
pub fn lift_modular_flow<T: Real>(
    word: &PoissonWord<T>,
    w: &Weight<T>,
    t: T,
) -> Result<PoissonWord<T>> {
    let mut letters = Vec::with_capacity(word.letters.len());
    for x in &word.letters {
        letters.push(modular_flow(w, x, t)?);
    }
    Ok(PoissonWord { kind: word.kind.clone(), letters })
}

/// KMS residual on the Γ-generators through the characteristic functional:
/// |exp(ω(σ_{t+i}(x)·y − 1)) − exp(ω(y·σ_t(x) − 1))|
/// with σ_{t+i} continued exactly in the density eigenbasis.
pub fn kms_residual<T: Real>(
    w: &Weight<T>,
    x: &AlgebraElement<T>,
    y: &AlgebraElement<T>,
    t: T,
) -> Result<T> {
    for z in [x, y] {
        let n = z.op_norm();
        if n > T::one() + T::of(1e-9) {
            return Err(Error::NotContraction(n.to_f64_lossy()));
        }
    }
    let xc = modular_flow_analytic(w, x, Complex::new(t, T::one()))?;
    let lhs = w.eval_minus_identity(&xc.mul(y))?.exp();
    let rhs = w.eval_minus_identity(&y.mul(&modular_flow(w, x, t)?))?.exp();
    Ok((lhs - rhs).norm())
}

/// Sp(Δ_ω): the density-eigenvalue ratios within each block, deduplicated
/// at relative tolerance 1e-10. Contains 1 and is closed under inversion.
pub fn arveson_spectrum<T: Real>(w: &Weight<T>) -> Vec<T> {
    ModularData::of(w).delta_spectrum
}

const LATTICE_TOL: f64 = 1e-9;
const MAX_DENOMINATOR: u64 = 1_000_000;
/// A rational approximation p/q of a log-ratio is only believed when its
/// error beats the generic (Dirichlet) 1/q² density by this margin;
/// otherwise every irrational would eventually look rational.
const DIRICHLET_MARGIN: f64 = 1e-3;

/// Best rational approximation of `x` by continued fractions, accepting
/// only approximations that are sharp beyond the Dirichlet density.
fn commensurate_ratio(x: f64) -> Option<(u64, u64)> {
    let mut a = x;
    let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, a.floor() as u64, 1u64);
    for _ in 0..64 {
        let err = (x - p1 as f64 / q1 as f64).abs();
        if err <= LATTICE_TOL.min(DIRICHLET_MARGIN / (q1 as f64 * q1 as f64)) {
            return Some((p1, q1));
        }
        let frac = a - a.floor();
        if frac.abs() < f64::EPSILON {
            break;
        }
        a = 1.0 / frac;
        let digit = a.floor() as u64;
        let p2 = digit.checked_mul(p1).and_then(|v| v.checked_add(p0))?;
        let q2 = digit.checked_mul(q1).and_then(|v| v.checked_add(q0))?;
        if q2 > MAX_DENOMINATOR {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Classify the factor type of the stabilized Poisson algebra of (N, ω)
/// from the multiplicative group generated by Sp(Δ_ω): {1} gives II₁, a
/// cyclic lattice e^{−g·ℤ} gives III_λ with λ = e^{−g}, a dense subgroup
/// gives III₁. Finitely many eigenvalue ratios cannot produce a III₀-type
/// pathology, so the only remaining outcome is a tolerance-band
/// `Indeterminate`.
pub fn classify_type<T: Real>(w: &Weight<T>) -> TypeReport {
    let spectrum = arveson_spectrum(w);
    // positive log-spectrum generators, normalized for the lattice search
    let mut logs: Vec<f64> = spectrum
        .iter()
        .map(|r| r.to_f64_lossy().ln().abs())
        .filter(|&l| l > 0.0)
        .collect();
    logs.sort_by(|a, b| a.partial_cmp(b).expect("log NaN"));
    logs.dedup_by(|a, b| (*a - *b).abs() <= LATTICE_TOL * b.abs().max(1.0));
    if logs.is_empty() {
        return TypeReport { class: TypeClass::TypeII1, log_spectrum: logs, lattice_step: 0.0 };
    }
    let scale = logs.last().copied().unwrap_or(1.0);
    // ratios so close to 1 that II₁-versus-III is below resolution
    if logs[0] / scale.max(1.0) < 10.0 * LATTICE_TOL && logs.len() == 1 {
        return TypeReport {
            class: TypeClass::Indeterminate,
            log_spectrum: logs,
            lattice_step: 0.0,
        };
    }
    // real gcd of the normalized logs by rational reduction
    let mut step = logs[0];
    for &l in &logs[1..] {
        match commensurate_ratio(l / step) {
            Some((p, q)) => {
                // l ≈ p·(step/q), step = q·(step/q): both multiples of step/q
                let g = gcd(p, q);
                step /= (q / g) as f64;
                if step / scale < 1.0 / MAX_DENOMINATOR as f64 {
                    return TypeReport {
                        class: TypeClass::TypeIII1,
                        log_spectrum: logs,
                        lattice_step: 0.0,
                    };
                }
            }
            None => {
                return TypeReport {
                    class: TypeClass::TypeIII1,
                    log_spectrum: logs,
                    lattice_step: 0.0,
                };
            }
        }
    }
    // verify every log sits on the detected lattice
    let mut worst = 0.0f64;
    for &l in &logs {
        let k = (l / step).round();
        worst = worst.max((l - k * step).abs() / scale);
    }
    if worst <= LATTICE_TOL {
        TypeReport {
            class: TypeClass::TypeIIIlambda((-step).exp()),
            log_spectrum: logs,
            lattice_step: step,
        }
    } else if worst <= 1e3 * LATTICE_TOL {
        TypeReport { class: TypeClass::Indeterminate, log_spectrum: logs, lattice_step: step }
    } else {
        TypeReport { class: TypeClass::TypeIII1, log_spectrum: logs, lattice_step: 0.0 }
    }
}

/// Weight from principal-series data: block k of dimension dims[k] carries
/// the scalar density e^{θ|t_k|}, normalized to unit mass, on the full
/// matrix algebra M_{Σ dims}. Two parameters t_ν, t_μ produce the modular
/// spectrum {e^{±θ(|t_ν|−|t_μ|)}, 1}, hence type III_λ with
/// λ = min{e^{θ(|t_ν|−|t_μ|)}, e^{θ(|t_μ|−|t_ν|)}}.
pub fn principal_series_weight<T: Real>(
    t_values: &[T],
    theta: T,
    dims: &[usize],
) -> Result<Weight<T>> {
    if t_values.is_empty() {
        return Err(Error::EmptyInput("principal-series weight needs at least one t".into()));
    }
    if t_values.len() != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} t-values against {} block dimensions",
            t_values.len(),
            dims.len()
        )));
    }
    let total: usize = dims.iter().sum();
    let mut entries = Vec::with_capacity(total);
    for (&t, &d) in t_values.iter().zip(dims) {
        let v = (theta * t.abs()).exp();
        for _ in 0..d {
            entries.push(v);
        }
    }
    let mass: T = entries.iter().fold(T::zero(), |a, &b| a + b);
    for e in entries.iter_mut() {
        *e /= mass;
    }
    Weight::new(AlgebraElement::from_blocks(vec![Mat::diag_re(&entries)]))
}

/// λ_{ν,μ} = min{e^{θ(|t_ν|−|t_μ|)}, e^{θ(|t_μ|−|t_ν|)}}: the modulus the
/// classifier must recover from a two-parameter principal-series weight.
pub fn principal_series_lambda<T: Real>(t_nu: T, t_mu: T, theta: T) -> T {
    let d = theta * (t_nu.abs() - t_mu.abs());
    d.exp().min((-d).exp())
}

/// The Poisson state is invariant under the lifted flow: Gram matrices of
/// flowed words equal those of the originals. Returns the largest entry
/// deviation over the λ_∅ Gram of the given words.
pub fn flow_gram_invariance<T: Real>(
    words: &[PoissonWord<T>],
    w: &Weight<T>,
    t: T,
) -> Result<T> {
    let flowed: Vec<PoissonWord<T>> =
        words.iter().map(|wd| lift_modular_flow(wd, w, t)).collect::<Result<_>>()?;
    let mut worst = T::zero();
    for (i, wi) in words.iter().enumerate() {
        for (j, wj) in words.iter().enumerate() {
            let before = crate::fock::gram_empty(w, &wi.letters, &wj.letters)?;
            let after = crate::fock::gram_empty(w, &flowed[i].letters, &flowed[j].letters)?;
            worst = worst.max((before - after).norm());
        }
    }
    Ok(worst)
}
