//! Brute-force oracle: the level-truncated direct sum ⊕_{m≤M} N^{⊗m} with
//! the weighted inner product ⟨u,v⟩ = e^{−ω(1)} Σ_m ω^{⊗m}(u_m* v_m)/m!.
//!
//! Every vector reachable from the vacuum by the quantization map
//! λ(x) = ⊕_m Σ_j π_j(x) and the multiplicative lift Γ(a) = ⊕_m a^{⊗m} is
//! invariant under leg permutation, so components are stored on the
//! symmetric subspace of N^{⊗m}. Concretely a component is a homogeneous
//! polynomial of degree m in D = dim N commuting coordinates, one per matrix
//! unit taken in the eigenbasis of the density — in that basis the
//! one-particle pairing ω(e_{ij}* e_{kl}) = δ δ λ_j is diagonal, which keeps
//! inner products linear in the number of stored monomials.
//!
//! λ(x) acts as the derivation Σ_α (Xz)_α ∂_α and Γ(a) as the substitution
//! z ↦ A z, where X, A are the left-multiplication matrices on the unit
//! basis. Both act level by level, so truncation at level M commutes with
//! every operator: the only truncation error anywhere is the missing
//! m > M terms of an inner product, controlled by the tail bound below.

use crate::algebra::{Algebra, AlgebraElement, Weight};
use crate::error::{Error, Result};
use crate::scalar::{cre, czero, Real, C};
use std::collections::HashMap;

/// Letters per symbolic word.
pub const MAX_LETTERS: usize = 6;

/// Guard on the dense symmetric-subspace dimension binom(D+M−1, M); vectors
/// are stored sparsely but a run that would need more than this many basis
/// directions is refused up front.
pub const SYMMETRIC_DIM_CAP: f64 = 2.0e8;

/// Symbolic vector label: a λ-, λ_∅-, or λ_∅∅-word over algebra elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordKind {
    /// λ(x_1)…λ(x_n) applied to the vacuum.
    Lambda,
    /// λ_∅(x_1,…,x_n): the recursion λ_∅(x,y⃗) = λ(x)λ_∅(y⃗) − Σ_i λ_∅(…,x·y_i,…).
    LambdaEmpty,
    /// λ_∅∅(x_1,…,x_n): the signed ω-weighted mean subtraction of λ_∅ words.
    LambdaEmptyEmpty,
}

/// A word of algebra elements with its basis kind.
#[derive(Clone, Debug)]
pub struct PoissonWord<T> {
    pub kind: WordKind,
    pub letters: Vec<AlgebraElement<T>>,
}

impl<T: Real> PoissonWord<T> {
    pub fn new(kind: WordKind, letters: Vec<AlgebraElement<T>>) -> Result<Self> {
        if letters.len() > MAX_LETTERS {
            return Err(Error::CapExceeded(format!(
                "word has {} letters, cap is {MAX_LETTERS}",
                letters.len()
            )));
        }
        Ok(PoissonWord { kind, letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Same kind, letters mapped through `f`.
    pub fn map_letters(&self, f: impl Fn(&AlgebraElement<T>) -> AlgebraElement<T>) -> Self {
        PoissonWord { kind: self.kind.clone(), letters: self.letters.iter().map(f).collect() }
    }
}

/// Sorted multiset of unit indices: one monomial of the symmetric subspace.
type Mono = Box<[u16]>;

/// Homogeneous component: sparse polynomial coefficients over monomials.
#[derive(Clone, Debug, Default)]
pub struct SymPoly<T> {
    terms: HashMap<Mono, C<T>>,
}

impl<T: Real> SymPoly<T> {
    fn new() -> Self {
        SymPoly { terms: HashMap::new() }
    }

    fn constant(c: C<T>) -> Self {
        let mut p = Self::new();
        p.terms.insert(Vec::new().into_boxed_slice(), c);
        p
    }

    fn insert_add(&mut self, key: Mono, c: C<T>) {
        if c.norm_sqr() == T::zero() {
            return;
        }
        *self.terms.entry(key).or_insert_with(czero) += c;
    }

    fn add_assign(&mut self, other: &Self) {
        for (k, &c) in &other.terms {
            self.insert_add(k.clone(), c);
        }
    }

    fn sub_assign(&mut self, other: &Self) {
        for (k, &c) in &other.terms {
            self.insert_add(k.clone(), -c);
        }
    }

    fn scale_assign(&mut self, c: C<T>) {
        for v in self.terms.values_mut() {
            *v *= c;
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Multiply by a linear form Σ coeff_β z_β, raising the degree by one.
    fn mul_linear(&self, form: &[(u16, C<T>)]) -> Self {
        let mut out = SymPoly::new();
        for (key, &c) in &self.terms {
            for &(beta, f) in form {
                let mut k: Vec<u16> = Vec::with_capacity(key.len() + 1);
                k.extend_from_slice(key);
                let pos = k.partition_point(|&v| v < beta);
                k.insert(pos, beta);
                out.insert_add(k.into_boxed_slice(), c * f);
            }
        }
        out
    }

    /// Derivation Σ_α (Xz)_α ∂/∂z_α: the action of Σ_j π_j(x) on the level.
    fn derive(&self, legs: &LegMap<T>) -> Self {
        let mut out = SymPoly::new();
        for (key, &c) in &self.terms {
            let mut start = 0usize;
            while start < key.len() {
                let alpha = key[start];
                let mut end = start;
                while end < key.len() && key[end] == alpha {
                    end += 1;
                }
                let mult = T::of((end - start) as f64);
                for &(beta, f) in &legs.cols[alpha as usize] {
                    let mut k: Vec<u16> = Vec::with_capacity(key.len());
                    k.extend_from_slice(&key[..start]);
                    k.extend_from_slice(&key[start + 1..]);
                    let pos = k.partition_point(|&v| v < beta);
                    k.insert(pos, beta);
                    out.insert_add(k.into_boxed_slice(), c * f.scale(mult));
                }
                start = end;
            }
        }
        out
    }

    /// Substitution z ↦ A z: the action of a^{⊗m} on the level.
    fn substitute(&self, legs: &LegMap<T>) -> Self {
        let mut out = SymPoly::new();
        for (key, &c) in &self.terms {
            // running product of the images of each leg
            let mut partial: HashMap<Mono, C<T>> = HashMap::new();
            partial.insert(Vec::new().into_boxed_slice(), c);
            for &alpha in key.iter() {
                let form = &legs.cols[alpha as usize];
                let mut next: HashMap<Mono, C<T>> =
                    HashMap::with_capacity(partial.len() * form.len().max(1));
                for (k, &pc) in &partial {
                    for &(beta, f) in form {
                        let mut nk: Vec<u16> = Vec::with_capacity(k.len() + 1);
                        nk.extend_from_slice(k);
                        let pos = nk.partition_point(|&v| v < beta);
                        nk.insert(pos, beta);
                        let entry = next.entry(nk.into_boxed_slice()).or_insert_with(czero);
                        *entry += pc * f;
                    }
                }
                partial = next;
            }
            for (k, v) in partial {
                if v.norm_sqr() != T::zero() {
                    *out.terms.entry(k).or_insert_with(czero) += v;
                }
            }
        }
        out
    }
}

/// Left-multiplication action of one algebra element on the unit basis:
/// column α lists the (β, coefficient) pairs of x·b_α.
pub struct LegMap<T> {
    cols: Vec<Vec<(u16, C<T>)>>,
}

/// Truncated GNS vector: one symmetric component per level 0..=M.
#[derive(Clone, Debug)]
pub struct TruncatedGnsVector<T> {
    levels: Vec<SymPoly<T>>,
}

impl<T: Real> TruncatedGnsVector<T> {
    pub fn cap(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, m: usize) -> &SymPoly<T> {
        &self.levels[m]
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.levels.len(), other.levels.len(), "level caps must agree");
        let mut out = self.clone();
        for (a, b) in out.levels.iter_mut().zip(&other.levels) {
            a.add_assign(b);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.levels.len(), other.levels.len(), "level caps must agree");
        let mut out = self.clone();
        for (a, b) in out.levels.iter_mut().zip(&other.levels) {
            a.sub_assign(b);
        }
        out
    }

    pub fn scale(&self, c: C<T>) -> Self {
        let mut out = self.clone();
        for l in out.levels.iter_mut() {
            l.scale_assign(c);
        }
        out
    }

    pub fn num_terms(&self) -> usize {
        self.levels.iter().map(|l| l.num_terms()).sum()
    }
}

/// The truncated GNS representation of one (algebra, weight) pair.
pub struct GnsContext<T> {
    weight: Weight<T>,
    unit_count: usize,
    /// Diagonal pairing weights w_α = λ_col(α), stored as logs.
    pairing_ln: Vec<f64>,
    /// Unit indices carrying the identity (diagonal units e_{ii}).
    diag_units: Vec<u16>,
    /// Per block, the density eigenbasis V (density = V diag(λ) V*).
    rot: Vec<crate::linalg::Mat<T>>,
    ln_fact: Vec<f64>,
}

impl<T: Real> GnsContext<T> {
    pub fn new(weight: &Weight<T>) -> Self {
        let alg = weight.algebra().clone();
        let mut unit_count = 0usize;
        let mut pairing_ln = Vec::with_capacity(alg.linear_dim());
        let mut diag_units = Vec::new();
        let mut rot = Vec::new();
        for (&d, (lam, v)) in alg.block_dims().iter().zip(weight.density_eig()) {
            rot.push(v.clone());
            for i in 0..d {
                for (j, l) in lam.iter().enumerate().take(d) {
                    let alpha = unit_count as u16;
                    unit_count += 1;
                    pairing_ln.push(l.to_f64_lossy().ln());
                    if i == j {
                        diag_units.push(alpha);
                    }
                }
            }
        }
        let mut ln_fact = vec![0.0f64; 257];
        for k in 1..ln_fact.len() {
            ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
        }
        GnsContext { weight: weight.clone(), unit_count, pairing_ln, diag_units, rot, ln_fact }
    }

    pub fn weight(&self) -> &Weight<T> {
        &self.weight
    }

    pub fn algebra(&self) -> &Algebra {
        self.weight.algebra()
    }

    /// Expansion coefficients of x over the eigenbasis units: x as the
    /// linear form Σ x'_{ij} z_{(b,i,j)} with x' = V* x V per block.
    pub fn linear_form(&self, x: &AlgebraElement<T>) -> Result<Vec<(u16, C<T>)>> {
        self.algebra().check_element(x)?;
        let mut form = Vec::new();
        let mut alpha = 0u16;
        for (b, xb) in x.blocks.iter().enumerate() {
            let xr = self.rot[b].adjoint().mul(xb).mul(&self.rot[b]);
            let d = xr.dim();
            for i in 0..d {
                for j in 0..d {
                    let v = xr[(i, j)];
                    if v.norm_sqr() != T::zero() {
                        form.push((alpha, v));
                    }
                    alpha += 1;
                }
            }
        }
        Ok(form)
    }

    /// Left-multiplication leg map of x: x·e_{ij} = Σ_k x'_{ki} e_{kj}.
    pub fn leg_map(&self, x: &AlgebraElement<T>) -> Result<LegMap<T>> {
        self.algebra().check_element(x)?;
        let mut cols = vec![Vec::new(); self.unit_count];
        let mut offset = 0usize;
        for (b, xb) in x.blocks.iter().enumerate() {
            let xr = self.rot[b].adjoint().mul(xb).mul(&self.rot[b]);
            let d = xr.dim();
            for i in 0..d {
                for j in 0..d {
                    let alpha = offset + i * d + j;
                    let col = &mut cols[alpha];
                    for k in 0..d {
                        let v = xr[(k, i)];
                        if v.norm_sqr() != T::zero() {
                            col.push(((offset + k * d + j) as u16, v));
                        }
                    }
                }
            }
            offset += d * d;
        }
        Ok(LegMap { cols })
    }

    fn check_cap(&self, m_cap: usize) -> Result<()> {
        // dense symmetric dimension binom(D+M−1, M)
        let d = self.unit_count as f64;
        let mut dim = 1.0f64;
        for k in 1..=m_cap {
            dim *= (d + k as f64 - 1.0) / k as f64;
            if dim > SYMMETRIC_DIM_CAP {
                return Err(Error::MemoryEstimate(format!(
                    "symmetric subspace dimension binom({}+{m_cap}-1,{m_cap}) exceeds {SYMMETRIC_DIM_CAP:.0}",
                    self.unit_count
                )));
            }
        }
        Ok(())
    }

    /// Vacuum ξ_ω at level cap M: every component the identity tensor 1^{⊗m}.
    pub fn vacuum(&self, m_cap: usize) -> Result<TruncatedGnsVector<T>> {
        self.check_cap(m_cap)?;
        let one_form: Vec<(u16, C<T>)> =
            self.diag_units.iter().map(|&a| (a, cre(T::one()))).collect();
        let mut levels = Vec::with_capacity(m_cap + 1);
        levels.push(SymPoly::constant(cre(T::one())));
        for m in 1..=m_cap {
            let next = levels[m - 1].mul_linear(&one_form);
            levels.push(next);
        }
        Ok(TruncatedGnsVector { levels })
    }

    /// Mass missing beyond the cap: e^{−ω(1)} Σ_{m>M} ω(1)^m/m!.
    pub fn vacuum_tail_mass(&self, m_cap: usize) -> T {
        let mass = self.weight.mass().to_f64_lossy();
        let mut term = 1.0f64;
        for k in 1..=m_cap {
            term *= mass / k as f64;
        }
        // Σ_{m>M} mass^m/m!
        let mut tail = 0.0;
        let mut t = term;
        for k in (m_cap + 1)..(m_cap + 400) {
            t *= mass / k as f64;
            tail += t;
            if t < 1e-300 {
                break;
            }
        }
        T::of((-mass).exp() * tail)
    }

    /// λ(x)v: components (Σ_j π_j(x)) v_m — level-preserving, exact.
    pub fn apply_lambda(
        &self,
        x: &AlgebraElement<T>,
        v: &TruncatedGnsVector<T>,
    ) -> Result<TruncatedGnsVector<T>> {
        let legs = self.leg_map(x)?;
        Ok(TruncatedGnsVector { levels: v.levels.iter().map(|p| p.derive(&legs)).collect() })
    }

    /// Γ(a)v: components a^{⊗m} v_m — exact per component, no series.
    pub fn apply_gamma(
        &self,
        a: &AlgebraElement<T>,
        v: &TruncatedGnsVector<T>,
    ) -> Result<TruncatedGnsVector<T>> {
        let legs = self.leg_map(a)?;
        Ok(TruncatedGnsVector { levels: v.levels.iter().map(|p| p.substitute(&legs)).collect() })
    }

    /// Γ(a)ξ without building intermediate substitutions: component m is the
    /// rank-one power (a·1)^{⊗m}.
    pub fn gamma_vacuum(&self, a: &AlgebraElement<T>, m_cap: usize) -> Result<TruncatedGnsVector<T>> {
        self.check_cap(m_cap)?;
        let form = self.linear_form(a)?;
        let mut levels = Vec::with_capacity(m_cap + 1);
        levels.push(SymPoly::constant(cre(T::one())));
        for m in 1..=m_cap {
            let next = levels[m - 1].mul_linear(&form);
            levels.push(next);
        }
        Ok(TruncatedGnsVector { levels })
    }

    /// Per-level contributions of ⟨u,v⟩ = e^{−ω(1)} Σ_m ω^{⊗m}(u_m* v_m)/m!.
    pub fn inner_levels(&self, u: &TruncatedGnsVector<T>, v: &TruncatedGnsVector<T>) -> Vec<C<T>> {
        assert_eq!(u.levels.len(), v.levels.len(), "level caps must agree");
        let mass = self.weight.mass().to_f64_lossy();
        let mut out = Vec::with_capacity(u.levels.len());
        for (m, (pu, pv)) in u.levels.iter().zip(&v.levels).enumerate() {
            let (small, big, conj_small) = if pu.terms.len() <= pv.terms.len() {
                (pu, pv, true)
            } else {
                (pv, pu, false)
            };
            let mut acc = czero::<T>();
            for (key, &cs) in &small.terms {
                if let Some(&cb) = big.terms.get(key) {
                    let fac = self.mono_weight(key, m);
                    let prod = if conj_small { cs.conj() * cb } else { cb.conj() * cs };
                    acc += prod.scale(fac);
                }
            }
            out.push(acc.scale(T::of((-mass).exp())));
        }
        out
    }

    /// Pairing weight of one monomial at level m:
    /// ∏_α (w_α^{m_α}·m_α!) / (m!)², evaluated in log space.
    fn mono_weight(&self, key: &[u16], m: usize) -> T {
        let mut ln = -2.0 * self.ln_fact[m];
        let mut start = 0usize;
        while start < key.len() {
            let alpha = key[start] as usize;
            let mut end = start;
            while end < key.len() && key[end] as usize == alpha {
                end += 1;
            }
            let mult = end - start;
            ln += mult as f64 * self.pairing_ln[alpha] + self.ln_fact[mult];
            start = end;
        }
        T::of(ln.exp())
    }

    pub fn inner(&self, u: &TruncatedGnsVector<T>, v: &TruncatedGnsVector<T>) -> C<T> {
        self.inner_levels(u, v).into_iter().fold(czero(), |a, b| a + b)
    }

    pub fn norm(&self, v: &TruncatedGnsVector<T>) -> T {
        self.inner(v, v).re.max(T::zero()).sqrt()
    }

    /// λ_∅(x_1,…,x_n)ξ through the recursion
    /// λ_∅(x_1,…,x_n) = λ(x_1)λ_∅(x_2,…,x_n) − Σ_i λ_∅(x_2,…,x_1x_i,…,x_n).
    fn lambda_empty_vector(
        &self,
        letters: &[AlgebraElement<T>],
        m_cap: usize,
    ) -> Result<TruncatedGnsVector<T>> {
        if letters.is_empty() {
            return self.vacuum(m_cap);
        }
        let head = &letters[0];
        let rest = &letters[1..];
        let mut v = self.apply_lambda(head, &self.lambda_empty_vector(rest, m_cap)?)?;
        for i in 0..rest.len() {
            let mut merged = rest.to_vec();
            merged[i] = head.mul(&rest[i]);
            v = v.sub(&self.lambda_empty_vector(&merged, m_cap)?);
        }
        Ok(v)
    }

    /// Realize a symbolic word as a truncated GNS vector (times the vacuum).
    pub fn build_word_vector(
        &self,
        word: &PoissonWord<T>,
        m_cap: usize,
    ) -> Result<TruncatedGnsVector<T>> {
        for l in &word.letters {
            self.algebra().check_element(l)?;
        }
        match word.kind {
            WordKind::Lambda => {
                let mut v = self.vacuum(m_cap)?;
                for x in word.letters.iter().rev() {
                    v = self.apply_lambda(x, &v)?;
                }
                Ok(v)
            }
            WordKind::LambdaEmpty => self.lambda_empty_vector(&word.letters, m_cap),
            WordKind::LambdaEmptyEmpty => {
                let n = word.letters.len();
                let mut means = Vec::with_capacity(n);
                for x in &word.letters {
                    means.push(self.weight.eval(x)?);
                }
                let mut total: Option<TruncatedGnsVector<T>> = None;
                for mask in 0u32..(1 << n) {
                    // mask = letters retained in the λ_∅ factor
                    let kept: Vec<AlgebraElement<T>> = (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| word.letters[i].clone())
                        .collect();
                    let dropped = (0..n).filter(|i| mask & (1 << i) == 0);
                    let mut coeff = cre(T::one());
                    let mut sign_flips = 0usize;
                    for i in dropped {
                        coeff *= means[i];
                        sign_flips += 1;
                    }
                    if sign_flips % 2 == 1 {
                        coeff = -coeff;
                    }
                    let term = self.lambda_empty_vector(&kept, m_cap)?.scale(coeff);
                    total = Some(match total {
                        None => term,
                        Some(acc) => acc.add(&term),
                    });
                }
                Ok(total.expect("at least the empty mask contributes"))
            }
        }
    }

    /// ⟨ξ, λ(x_1)…λ(x_n)ξ⟩ at the cap, splitting the word in half and using
    /// λ(x)* = λ(x*) so each side only sees ⌈n/2⌉ derivations.
    pub fn moment_oracle(&self, letters: &[AlgebraElement<T>], m_cap: usize) -> Result<C<T>> {
        let split = letters.len() / 2;
        let mut right = self.vacuum(m_cap)?;
        for x in letters[split..].iter().rev() {
            right = self.apply_lambda(x, &right)?;
        }
        let mut left = self.vacuum(m_cap)?;
        for x in letters[..split].iter() {
            left = self.apply_lambda(&x.adjoint(), &left)?;
        }
        Ok(self.inner(&left, &right))
    }
}

/// Analytic tail bound Σ_{m>M} m^{n_total}·mass^m/m! × prod_norms: a word of
/// total length n_total applied across both sides of an inner product
/// contributes at most m^{n_total}·Π‖x_i‖ per level against the vacuum mass
/// series.
pub fn tail_bound<T: Real>(m_cap: usize, mass: T, n_total: usize, prod_norms: T) -> T {
    let mass = mass.to_f64_lossy();
    let mut term = (-mass).exp();
    for k in 1..=m_cap {
        term *= mass / k as f64;
    }
    let mut tail = 0.0f64;
    let mut t = term;
    for m in (m_cap + 1)..(m_cap + 500) {
        t *= mass / m as f64;
        let contrib = t * (m as f64).powi(n_total as i32);
        tail += contrib;
        if contrib < 1e-320 && m > m_cap + 5 {
            break;
        }
    }
    T::of(tail) * prod_norms
}

/// Adaptive truncation rule: the smallest cap (from a starting doubling
/// ladder) whose analytic tail bound is below tol/10, refusing caps whose
/// dense symmetric dimension blows the memory guard.
pub fn adaptive_cap<T: Real>(
    w: &Weight<T>,
    tol: T,
    n_total: usize,
    prod_norms: T,
    d_linear: usize,
) -> Result<usize> {
    let budget = tol * T::of(0.1);
    let mut m = 4usize;
    loop {
        if tail_bound(m, w.mass(), n_total, prod_norms) < budget {
            // walk back to the smallest sufficient cap inside the ladder
            while m > 1 && tail_bound(m - 1, w.mass(), n_total, prod_norms) < budget {
                m -= 1;
            }
            return Ok(m);
        }
        m *= 2;
        // dense symmetric dimension guard
        let mut dim = 1.0f64;
        for k in 1..=m {
            dim *= (d_linear as f64 + k as f64 - 1.0) / k as f64;
        }
        if dim > SYMMETRIC_DIM_CAP || m > 512 {
            return Err(Error::MemoryEstimate(format!(
                "tail bound still {} at cap {m}",
                tail_bound(m, w.mass(), n_total, prod_norms).to_f64_lossy()
            )));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{characteristic, classical_pmf, poisson_moment, MomentQuery};
    use crate::testutil::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_norm_examples() {
        // M = 0: a single term e^{−ω(1)}
        let w = Weight::diagonal(&[0.4f64, 0.3]).unwrap();
        let ctx = GnsContext::new(&w);
        let xi0 = ctx.vacuum(0).unwrap();
        assert!((ctx.inner(&xi0, &xi0).re - (-0.7f64).exp()).abs() < 1e-15);
        // ω(1) = 1, M = 20: norm² = 1 within 1e-15
        let w1 = Weight::diagonal(&[0.6f64, 0.4]).unwrap();
        let ctx1 = GnsContext::new(&w1);
        let xi = ctx1.vacuum(20).unwrap();
        assert!((ctx1.inner(&xi, &xi).re - 1.0).abs() < 1e-15);
        // reported tail matches the missing mass
        let got = ctx1.vacuum_tail_mass(20);
        let direct: f64 = (21..60).map(|m| {
            let mut t = (-1.0f64).exp();
            for k in 1..=m { t *= 1.0 / k as f64; }
            t
        }).sum();
        assert!((got - direct).abs() < 1e-18);
    }

    #[test]
    fn scalar_vacuum_recovers_classical_pmf() {
        let lam = 1.7f64;
        let w = Weight::diagonal(&[lam]).unwrap();
        let ctx = GnsContext::new(&w);
        let xi = ctx.vacuum(25).unwrap();
        let levels = ctx.inner_levels(&xi, &xi);
        for k in 0..=20usize {
            let expect = classical_pmf(lam, k as u32).unwrap();
            assert!(
                (levels[k].re - expect).abs() < 1e-15,
                "level {k}: {} vs pmf {}",
                levels[k].re,
                expect
            );
        }
    }

    #[test]
    fn number_operator_grading() {
        let w = Weight::diagonal(&[0.5f64, 0.5]).unwrap();
        let ctx = GnsContext::new(&w);
        let xi = ctx.vacuum(8).unwrap();
        let one = w.algebra().identity::<f64>();
        let n_xi = ctx.apply_lambda(&one, &xi).unwrap();
        // component m must equal m·ξ_m: check via level inner products
        let base = ctx.inner_levels(&xi, &xi);
        let mixed = ctx.inner_levels(&xi, &n_xi);
        for m in 0..=8 {
            assert!((mixed[m].re - m as f64 * base[m].re).abs() < 1e-14);
        }
    }

    #[test]
    fn lambda_is_a_lie_homomorphism() {
        // λ([x,y]) = [λ(x), λ(y)] as operators on the truncated space
        let mut next = rng_stream(101);
        let alg = Algebra::full(2);
        let w = random_weight(&alg, 1.0, &mut next);
        let ctx = GnsContext::new(&w);
        let x = random_element(&alg, &mut next);
        let y = random_element(&alg, &mut next);
        let v = {
            // a mildly generic vector: λ(z)λ(z')ξ
            let z = random_element(&alg, &mut next);
            let z2 = random_element(&alg, &mut next);
            let v0 = ctx.vacuum(10).unwrap();
            let v1 = ctx.apply_lambda(&z2, &v0).unwrap();
            ctx.apply_lambda(&z, &v1).unwrap()
        };
        let lhs = ctx.apply_lambda(&x.commutator(&y), &v).unwrap();
        let a = ctx.apply_lambda(&x, &ctx.apply_lambda(&y, &v).unwrap()).unwrap();
        let b = ctx.apply_lambda(&y, &ctx.apply_lambda(&x, &v).unwrap()).unwrap();
        let rhs = a.sub(&b);
        let diff = lhs.sub(&rhs);
        assert!(ctx.norm(&diff) < 1e-10 * (1.0 + ctx.norm(&v)));
    }

    #[test]
    fn lambda_adjoint_is_adjoint_letter() {
        let mut next = rng_stream(107);
        let alg = Algebra::full(2);
        let w = random_weight(&alg, 0.8, &mut next);
        let ctx = GnsContext::new(&w);
        let x = random_element(&alg, &mut next);
        let u = ctx.vacuum(12).unwrap();
        let z = random_element(&alg, &mut next);
        let v = ctx.apply_lambda(&z, &ctx.vacuum(12).unwrap()).unwrap();
        let lhs = ctx.inner(&ctx.apply_lambda(&x, &u).unwrap(), &v);
        let rhs = ctx.inner(&u, &ctx.apply_lambda(&x.adjoint(), &v).unwrap());
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn one_letter_moment_sees_only_the_tail() {
        let mut next = rng_stream(113);
        let alg = Algebra::full(2);
        let w = random_weight(&alg, 0.9, &mut next);
        let ctx = GnsContext::new(&w);
        let x = random_element(&alg, &mut next);
        let cap = 20;
        let got = ctx.moment_oracle(&[x.clone()], cap).unwrap();
        let expect = w.eval(&x).unwrap();
        let bound = tail_bound(cap, w.mass(), 1, x.op_norm());
        assert!((got - expect).norm() <= bound + 1e-14);
    }

    #[test]
    fn moment_formula_agrees_with_oracle() {
        // the central cross-check: closed-form partition sum vs the
        // truncated direct-sum inner product
        let mut next = rng_stream(127);
        for &d in &[2usize, 3] {
            let alg = Algebra::full(d);
            let w = random_weight(&alg, 1.0, &mut next);
            let ctx = GnsContext::new(&w);
            for n in 1..=4usize {
                let xs: Vec<_> = (0..n).map(|_| random_contraction(&alg, &mut next)).collect();
                let closed =
                    poisson_moment(&MomentQuery::new(&w, xs.clone()).unwrap()).unwrap();
                let cap = adaptive_cap(&w, 1e-8, n, 1.0, alg.linear_dim()).unwrap();
                let oracle = ctx.moment_oracle(&xs, cap).unwrap();
                assert!(
                    (closed - oracle).norm() < 1e-8,
                    "d={d} n={n}: closed {closed} oracle {oracle} cap {cap}"
                );
            }
        }
    }

    #[test]
    fn gamma_identity_and_characteristic() {
        let mut next = rng_stream(131);
        let alg = Algebra::full(2);
        let w = random_weight(&alg, 1.0, &mut next);
        let ctx = GnsContext::new(&w);
        let v = ctx.apply_lambda(
            &random_element(&alg, &mut next),
            &ctx.vacuum(10).unwrap(),
        )
        .unwrap();
        // Γ(1) = id
        let gv = ctx.apply_gamma(&alg.identity(), &v).unwrap();
        assert!(ctx.norm(&gv.sub(&v)) < 1e-13);
        // ⟨ξ, Γ(e^{ix})ξ⟩ ≈ exp(ω(e^{ix}−1))
        for _ in 0..5 {
            let x = random_contraction(&alg, &mut next);
            let u = x.exp_i().unwrap();
            let cap = adaptive_cap(&w, 1e-10, 0, 1.0, alg.linear_dim()).unwrap();
            let xi = ctx.vacuum(cap).unwrap();
            let gxi = ctx.gamma_vacuum(&u, cap).unwrap();
            let got = ctx.inner(&xi, &gxi);
            let expect = characteristic(&w, &x).unwrap();
            assert!((got - expect).norm() < 1e-10, "got {got} expect {expect}");
        }
    }

    #[test]
    fn gamma_vacuum_matches_substitution() {
        let mut next = rng_stream(137);
        let alg = Algebra::new(vec![2, 1]).unwrap();
        let w = random_weight(&alg, 0.9, &mut next);
        let ctx = GnsContext::new(&w);
        let a = random_element(&alg, &mut next);
        let xi = ctx.vacuum(7).unwrap();
        let via_subst = ctx.apply_gamma(&a, &xi).unwrap();
        let direct = ctx.gamma_vacuum(&a, 7).unwrap();
        assert!(ctx.norm(&via_subst.sub(&direct)) < 1e-12);
    }

    #[test]
    fn corner_supported_gammas_commute() {
        // x ∈ eNe, y ∈ fNf with e ⟂ f diagonal projections: Γ(e^{ix}) and
        // Γ(e^{iy}) commute on truncated vectors exactly.
        let mut next = rng_stream(139);
        let w = Weight::diagonal(&[0.4f64, 0.3, 0.3]).unwrap();
        let alg = w.algebra().clone();
        let ctx = GnsContext::new(&w);
        // corners: e = diag(1,1,0), f = diag(0,0,1)
        for _ in 0..10 {
            let h = random_hermitian(&alg, &mut next);
            let mut xb = h.blocks[0].clone();
            for i in 0..3 {
                xb[(i, 2)] = c(0.0, 0.0);
                xb[(2, i)] = c(0.0, 0.0);
            }
            let x = AlgebraElement::from_blocks(vec![xb]);
            let mut yb = crate::linalg::Mat::zeros(3);
            yb[(2, 2)] = c(next(), 0.0);
            let y = AlgebraElement::from_blocks(vec![yb]);
            let a = x.exp_i().unwrap();
            let b = y.exp_i().unwrap();
            let v = {
                let z = random_element(&alg, &mut next);
                ctx.apply_lambda(&z, &ctx.vacuum(6).unwrap()).unwrap()
            };
            let ab = ctx.apply_gamma(&a, &ctx.apply_gamma(&b, &v).unwrap()).unwrap();
            let ba = ctx.apply_gamma(&b, &ctx.apply_gamma(&a, &v).unwrap()).unwrap();
            let nv = ctx.norm(&v);
            assert!(ctx.norm(&ab.sub(&ba)) <= 1e-10 * (1.0 + nv));
        }
    }

    #[test]
    fn word_vector_base_cases() {
        let mut next = rng_stream(149);
        let alg = Algebra::full(2);
        let w = random_weight(&alg, 0.8, &mut next);
        let ctx = GnsContext::new(&w);
        let x = random_element(&alg, &mut next);
        let y = random_element(&alg, &mut next);
        let cap = 10;
        // λ_∅(x) = λ(x)ξ
        let le = ctx
            .build_word_vector(&PoissonWord::new(WordKind::LambdaEmpty, vec![x.clone()]).unwrap(), cap)
            .unwrap();
        let lx = ctx.apply_lambda(&x, &ctx.vacuum(cap).unwrap()).unwrap();
        assert!(ctx.norm(&le.sub(&lx)) < 1e-13);
        // λ_∅(x,y) = λ(x)λ(y)ξ − λ(xy)ξ
        let lxy = ctx
            .build_word_vector(
                &PoissonWord::new(WordKind::LambdaEmpty, vec![x.clone(), y.clone()]).unwrap(),
                cap,
            )
            .unwrap();
        let direct = ctx
            .apply_lambda(&x, &ctx.apply_lambda(&y, &ctx.vacuum(cap).unwrap()).unwrap())
            .unwrap()
            .sub(&ctx.apply_lambda(&x.mul(&y), &ctx.vacuum(cap).unwrap()).unwrap());
        assert!(ctx.norm(&lxy.sub(&direct)) < 1e-12);
        // λ_∅∅(x) = λ(x)ξ − ω(x)ξ is mean zero: ⟨ξ, λ_∅∅(x)ξ⟩ = 0
        let lee = ctx
            .build_word_vector(
                &PoissonWord::new(WordKind::LambdaEmptyEmpty, vec![x.clone()]).unwrap(),
                cap,
            )
            .unwrap();
        let explicit = lx.sub(&ctx.vacuum(cap).unwrap().scale(w.eval(&x).unwrap()));
        assert!(ctx.norm(&lee.sub(&explicit)) < 1e-12);
        // the mean-zero pairing telescopes across levels, so it vanishes
        // only up to the truncation tail
        let cap = 20;
        let xi = ctx.vacuum(cap).unwrap();
        let lee = ctx
            .build_word_vector(
                &PoissonWord::new(WordKind::LambdaEmptyEmpty, vec![x.clone()]).unwrap(),
                cap,
            )
            .unwrap();
        let slack = tail_bound(cap, w.mass(), 1, x.op_norm() + w.eval(&x).unwrap().norm());
        assert!(ctx.inner(&xi, &lee).norm() <= slack + 1e-13);
    }

    #[test]
    fn adaptive_cap_is_monotone_in_tolerance() {
        let w = Weight::diagonal(&[0.5f64, 0.5]).unwrap();
        let loose = adaptive_cap(&w, 1e-4, 2, 1.0, 4).unwrap();
        let tight = adaptive_cap(&w, 1e-10, 2, 1.0, 4).unwrap();
        assert!(tight >= loose);
        assert!(tail_bound(tight, 1.0f64, 2, 1.0) < 1e-11);
    }

    #[test]
    fn memory_guard_fires() {
        let w = Weight::diagonal(&[1.0f64; 5]).unwrap(); // D = 25
        let ctx = GnsContext::new(&w);
        assert!(matches!(ctx.vacuum(100), Err(Error::MemoryEstimate(_))));
    }
}
