//! Lifts of weight-preserving maps to the Poisson word layer: normal
//! *-homomorphisms (Gram-preserving), conditional expectations (idempotent
//! orthogonal projections), corner projections with their explicit
//! coefficient expansion, strong-independence verification for orthogonal
//! centralizer corners, and unital completely positive maps.

use crate::algebra::{Algebra, AlgebraElement, Weight};
use crate::error::{Error, Result};
use crate::fock::gram_empty;
use crate::gns::{GnsContext, PoissonWord, TruncatedGnsVector, WordKind};
use crate::linalg::Mat;
use crate::moments::{poisson_moment, MomentQuery};
use crate::scalar::{cre, czero, Real, C};

/// Flags a linear map may carry; each one is testable against the action.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MapFlags {
    pub unital: bool,
    pub positive: bool,
    pub completely_positive: bool,
    pub homomorphism: bool,
}

/// Linear map between two block algebras, stored as its action matrix on
/// the flat matrix-unit bases, with an optionally supplied dual T̂ forming
/// the pair ω_dst(T(x)·y) = ω_src(x·T̂(y)).
#[derive(Clone, Debug)]
pub struct LinearMapOnAlgebra<T> {
    src: Algebra,
    dst: Algebra,
    action: Vec<Vec<C<T>>>,
    dual: Option<Vec<Vec<C<T>>>>,
}

fn flat_coeffs<T: Real>(x: &AlgebraElement<T>) -> Vec<C<T>> {
    let mut v = Vec::new();
    for b in &x.blocks {
        let d = b.dim();
        for i in 0..d {
            for j in 0..d {
                v.push(b[(i, j)]);
            }
        }
    }
    v
}

fn unflatten<T: Real>(alg: &Algebra, coeffs: &[C<T>]) -> AlgebraElement<T> {
    let mut blocks = Vec::with_capacity(alg.num_blocks());
    let mut pos = 0usize;
    for &d in alg.block_dims() {
        let mut m = Mat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = coeffs[pos];
                pos += 1;
            }
        }
        blocks.push(m);
    }
    AlgebraElement::from_blocks(blocks)
}

fn units<T: Real>(alg: &Algebra) -> Vec<AlgebraElement<T>> {
    let mut out = Vec::with_capacity(alg.linear_dim());
    for (b, &d) in alg.block_dims().iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                out.push(alg.matrix_unit(b, i, j));
            }
        }
    }
    out
}

impl<T: Real> LinearMapOnAlgebra<T> {
    /// Build from the action on elements.
    pub fn from_function(
        src: &Algebra,
        dst: &Algebra,
        f: impl Fn(&AlgebraElement<T>) -> AlgebraElement<T>,
    ) -> Self {
        let cols: Vec<Vec<C<T>>> = units::<T>(src).iter().map(|u| flat_coeffs(&f(u))).collect();
        let (rows, ncols) = (dst.linear_dim(), src.linear_dim());
        let mut action = vec![vec![czero::<T>(); ncols]; rows];
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                action[i][j] = v;
            }
        }
        LinearMapOnAlgebra { src: src.clone(), dst: dst.clone(), action, dual: None }
    }

    pub fn identity(alg: &Algebra) -> Self {
        Self::from_function(alg, alg, |x| x.clone())
    }

    /// x ↦ u x u* for a fixed unitary u.
    pub fn unitary_conjugation(alg: &Algebra, u: &AlgebraElement<T>) -> Self {
        let ustar = u.adjoint();
        Self::from_function(alg, alg, |x| u.mul(x).mul(&ustar))
    }

    /// Compression onto the diagonal subalgebra (zero out off-diagonal
    /// entries blockwise): the conditional expectation when the density is
    /// diagonal.
    pub fn diagonal_compression(alg: &Algebra) -> Self {
        Self::from_function(alg, alg, |x| {
            let blocks = x
                .blocks
                .iter()
                .map(|m| {
                    let mut out = Mat::zeros(m.dim());
                    for i in 0..m.dim() {
                        out[(i, i)] = m[(i, i)];
                    }
                    out
                })
                .collect();
            AlgebraElement::from_blocks(blocks)
        })
    }

    pub fn src(&self) -> &Algebra {
        &self.src
    }

    pub fn dst(&self) -> &Algebra {
        &self.dst
    }

    pub fn apply(&self, x: &AlgebraElement<T>) -> Result<AlgebraElement<T>> {
        self.src.check_element(x)?;
        let cx = flat_coeffs(x);
        let mut out = vec![czero::<T>(); self.dst.linear_dim()];
        for (i, row) in self.action.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                out[i] += a * cx[j];
            }
        }
        Ok(unflatten(&self.dst, &out))
    }

    pub fn has_dual(&self) -> bool {
        self.dual.is_some()
    }

    /// Apply the declared dual T̂: dst → src.
    pub fn apply_dual(&self, y: &AlgebraElement<T>) -> Result<AlgebraElement<T>> {
        let dual = self.dual.as_ref().ok_or(Error::MissingDual)?;
        self.dst.check_element(y)?;
        let cy = flat_coeffs(y);
        let mut out = vec![czero::<T>(); self.src.linear_dim()];
        for (i, row) in dual.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                out[i] += a * cy[j];
            }
        }
        Ok(unflatten(&self.src, &out))
    }

    /// Attach the dual computed as the adjoint with respect to the
    /// weight-induced bilinear pairings ⟨x,y⟩_ω = ω(xy): solves
    /// ω_dst(T(b_α)·b'_β) = ω_src(b_α·T̂(b'_β)) on the unit bases.
    pub fn with_weight_dual(mut self, w_src: &Weight<T>, w_dst: &Weight<T>) -> Result<Self> {
        if w_src.algebra() != &self.src || w_dst.algebra() != &self.dst {
            return Err(Error::DimensionMismatch("dual pairing weights mismatch the map".into()));
        }
        let us = units::<T>(&self.src);
        let ud = units::<T>(&self.dst);
        let ns = us.len();
        let nd = ud.len();
        // P_src[a][b] = ω_src(b_a · b_b); rhs[a][β] = ω_dst(T(b_a) · b'_β)
        let mut p = Mat::zeros(ns);
        for a in 0..ns {
            for b in 0..ns {
                p[(a, b)] = w_src.eval(&us[a].mul(&us[b]))?;
            }
        }
        let mut rhs = Mat::zeros(ns.max(nd));
        let mut rhs_cols = vec![vec![czero::<T>(); nd]; ns];
        for a in 0..ns {
            let ta = self.apply(&us[a])?;
            for (beta, u) in ud.iter().enumerate() {
                rhs_cols[a][beta] = w_dst.eval(&ta.mul(u))?;
            }
        }
        // dual coefficients column by column: P · T̂[:,β] = rhs[:,β]
        if ns != rhs.dim() {
            rhs = Mat::zeros(ns);
        }
        let mut dual = vec![vec![czero::<T>(); nd]; ns];
        for beta in 0..nd {
            for a in 0..ns {
                rhs[(a, 0)] = rhs_cols[a][beta];
            }
            let sol = p.solve(&rhs).ok_or_else(|| {
                Error::DimensionMismatch("weight pairing is degenerate".into())
            })?;
            for a in 0..ns {
                dual[a][beta] = sol[(a, 0)];
            }
        }
        // dual stored as action on coefficients: T̂(y) = Σ_β y_β T̂(b'_β),
        // and T̂(b'_β) = Σ_a dual[a][β]·b_a
        self.dual = Some(dual);
        Ok(self)
    }

    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.dst != self.src {
            return Err(Error::DimensionMismatch("composition shape mismatch".into()));
        }
        let outer = self.clone();
        let inner = inner.clone();
        Ok(Self::from_function(&inner.src.clone(), &self.dst.clone(), move |x| {
            outer.apply(&inner.apply(x).expect("checked")).expect("checked")
        }))
    }

    /// ‖T(1) − 1‖.
    pub fn unital_residual(&self) -> T {
        let t1 = self.apply(&self.src.identity()).expect("identity is in the source");
        t1.sub(&self.dst.identity()).max_abs()
    }

    /// Smallest eigenvalue of the Choi matrix of T∘E, where E is the
    /// block-diagonal compression of the enveloping full matrix algebra;
    /// nonnegative iff T is completely positive.
    pub fn choi_defect(&self) -> T {
        let n_src = self.src.matrix_dim();
        let n_dst = self.dst.matrix_dim();
        // block-diagonal coordinates of the enveloping algebra
        let offsets: Vec<usize> = self
            .src
            .block_dims()
            .iter()
            .scan(0usize, |acc, &d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect();
        let mut choi = Mat::zeros(n_src * n_dst);
        for (b, (&d, &off)) in self.src.block_dims().iter().zip(&offsets).enumerate() {
            for i in 0..d {
                for j in 0..d {
                    let t_eij = self.apply(&self.src.matrix_unit(b, i, j)).expect("unit");
                    // embed T(e_ij) block-diagonally into M_{n_dst}
                    let mut big = Mat::zeros(n_dst);
                    let mut doff = 0usize;
                    for tb in &t_eij.blocks {
                        for a in 0..tb.dim() {
                            for c in 0..tb.dim() {
                                big[(doff + a, doff + c)] = tb[(a, c)];
                            }
                        }
                        doff += tb.dim();
                    }
                    let (gi, gj) = (off + i, off + j);
                    for a in 0..n_dst {
                        for c in 0..n_dst {
                            choi[(gi * n_dst + a, gj * n_dst + c)] = big[(a, c)];
                        }
                    }
                }
            }
        }
        choi.hermitize().min_eig_hermitian()
    }

    /// Largest deviation of T(b_α b_β) from T(b_α)T(b_β) over the unit
    /// basis: zero iff T is multiplicative.
    pub fn homomorphism_residual(&self) -> T {
        let us = units::<T>(&self.src);
        let mut worst = T::zero();
        for a in &us {
            let ta = self.apply(a).expect("unit");
            for b in &us {
                let tab = self.apply(&a.mul(b)).expect("unit product");
                worst = worst.max(tab.sub(&ta.mul(&self.apply(b).expect("unit"))).max_abs());
            }
        }
        worst
    }

    pub fn flags(&self, tol: T) -> MapFlags {
        MapFlags {
            unital: self.unital_residual() <= tol,
            positive: self.choi_defect() >= -tol, // CP implies positive
            completely_positive: self.choi_defect() >= -tol,
            homomorphism: self.homomorphism_residual() <= tol,
        }
    }
}

/// max over basis units of |ω_dst(T(x)) − ω_src(x)|.
pub fn check_weight_preserving<T: Real>(
    map: &LinearMapOnAlgebra<T>,
    w_src: &Weight<T>,
    w_dst: &Weight<T>,
) -> Result<T> {
    if w_src.algebra() != map.src() || w_dst.algebra() != map.dst() {
        return Err(Error::DimensionMismatch("weights do not match the map's algebras".into()));
    }
    let mut worst = T::zero();
    for u in units::<T>(map.src()) {
        let lhs = w_dst.eval(&map.apply(&u)?)?;
        let rhs = w_src.eval(&u)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

const PRESERVATION_TOL: f64 = 1e-8;

/// Letterwise lift of a weight-preserving map with a declared dual onto a
/// symbolic word. Homomorphisms preserve closed-form Grams exactly;
/// conditional expectations act idempotently.
pub fn lift_on_words<T: Real>(
    map: &LinearMapOnAlgebra<T>,
    word: &PoissonWord<T>,
    w_src: &Weight<T>,
    w_dst: &Weight<T>,
) -> Result<PoissonWord<T>> {
    if !map.has_dual() {
        return Err(Error::MissingDual);
    }
    let res = check_weight_preserving(map, w_src, w_dst)?;
    if res.to_f64_lossy() > PRESERVATION_TOL {
        return Err(Error::NotWeightPreserving(res.to_f64_lossy()));
    }
    let mut letters = Vec::with_capacity(word.letters.len());
    for x in &word.letters {
        letters.push(map.apply(x)?);
    }
    PoissonWord::new(word.kind.clone(), letters)
}

fn projection_residual<T: Real>(e: &AlgebraElement<T>) -> T {
    e.sub(&e.adjoint()).max_abs().max(e.mul(e).sub(e).max_abs())
}

fn centralizer_residual<T: Real>(e: &AlgebraElement<T>, w: &Weight<T>) -> T {
    e.mul(w.density()).sub(&w.density().mul(e)).max_abs()
}

/// One term of a corner expansion: scalar coefficient and the sub-word of
/// compressed letters.
#[derive(Clone, Debug)]
pub struct CornerTerm<T> {
    pub coefficient: C<T>,
    pub kept_mask: u32,
    pub word: PoissonWord<T>,
}

/// Γ(E_e) on a λ_∅ word, for a projection e in the centralizer of ω:
/// Σ_{A⊆[n]} Π_{i∉A} ω((1−e)x_i) · λ_∅(e x_j e : j∈A).
/// The orientation (integrated-out letters carry the ω((1−e)·) factors,
/// kept letters are compressed) is pinned by the GNS oracle below.
pub fn corner_project<T: Real>(
    e: &AlgebraElement<T>,
    word: &PoissonWord<T>,
    w: &Weight<T>,
) -> Result<Vec<CornerTerm<T>>> {
    w.algebra().check_element(e)?;
    let pr = projection_residual(e);
    if pr > T::of(1e-12) {
        return Err(Error::NotCentralizerProjection(format!(
            "not a projection (residual {:.3e})",
            pr.to_f64_lossy()
        )));
    }
    let cr = centralizer_residual(e, w);
    if cr > T::of(1e-12) {
        return Err(Error::NotCentralizerProjection(format!(
            "does not commute with the density (residual {:.3e})",
            cr.to_f64_lossy()
        )));
    }
    if word.kind != WordKind::LambdaEmpty {
        return Err(Error::OutOfRange("corner projection acts on λ_∅ words".into()));
    }
    let n = word.letters.len();
    let one_minus_e = w.algebra().identity::<T>().sub(e);
    let mut terms = Vec::with_capacity(1 << n);
    for kept in 0u32..(1 << n) {
        let mut coefficient = cre(T::one());
        for i in (0..n).filter(|i| kept & (1 << i) == 0) {
            coefficient *= w.eval(&one_minus_e.mul(&word.letters[i]))?;
        }
        let letters: Vec<AlgebraElement<T>> = (0..n)
            .filter(|i| kept & (1 << i) != 0)
            .map(|i| e.mul(&word.letters[i]).mul(e))
            .collect();
        terms.push(CornerTerm {
            coefficient,
            kept_mask: kept,
            word: PoissonWord::new(WordKind::LambdaEmpty, letters)?,
        });
    }
    Ok(terms)
}

/// Residual between the corner expansion and the least-squares orthogonal
/// projection of the word onto the span of compressed sub-words in the
/// truncated GNS space.
pub fn corner_project_oracle_residual<T: Real>(
    ctx: &GnsContext<T>,
    e: &AlgebraElement<T>,
    word: &PoissonWord<T>,
    m_cap: usize,
) -> Result<T> {
    let w = ctx.weight();
    let terms = corner_project(e, word, w)?;
    let v = ctx.build_word_vector(word, m_cap)?;
    // spanning family: the compressed sub-words appearing in the expansion
    let span: Vec<TruncatedGnsVector<T>> = terms
        .iter()
        .map(|t| ctx.build_word_vector(&t.word, m_cap))
        .collect::<Result<_>>()?;
    let k = span.len();
    let mut gram = Mat::zeros(k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = ctx.inner(&span[i], &span[j]);
        }
    }
    // least squares through the spectral pseudo-inverse of the Gram
    let (lam, vecs) = gram.hermitize().eig_hermitian();
    let floor = lam.last().copied().unwrap_or(T::zero()).max(T::one()) * T::of(1e-12);
    let mut rhs = vec![czero::<T>(); k];
    for i in 0..k {
        rhs[i] = ctx.inner(&span[i], &v);
    }
    let mut coeffs = vec![czero::<T>(); k];
    for mode in 0..k {
        if lam[mode] <= floor {
            continue;
        }
        let mut proj = czero::<T>();
        for i in 0..k {
            proj += vecs[(i, mode)].conj() * rhs[i];
        }
        let scaled = proj.scale(T::one() / lam[mode]);
        for i in 0..k {
            coeffs[i] += vecs[(i, mode)] * scaled;
        }
    }
    let mut lsq: Option<TruncatedGnsVector<T>> = None;
    let mut formula: Option<TruncatedGnsVector<T>> = None;
    for i in 0..k {
        let s = span[i].scale(coeffs[i]);
        lsq = Some(match lsq {
            None => s,
            Some(acc) => acc.add(&s),
        });
        let f = span[i].scale(terms[i].coefficient);
        formula = Some(match formula {
            None => f,
            Some(acc) => acc.add(&f),
        });
    }
    let (lsq, formula) = (lsq.expect("nonempty span"), formula.expect("nonempty span"));
    Ok(ctx.norm(&formula.sub(&lsq)))
}

/// Outcome of the strong-independence verification for orthogonal
/// centralizer corners.
#[derive(Clone, Debug)]
pub struct IndependenceReport<T> {
    /// max commutator norm of the two Γ lifts over the probe vectors.
    pub commutator_norm: T,
    /// |φ(Γ(e^{ix})Γ(e^{iy})) − φ(Γ(e^{ix}))·φ(Γ(e^{iy}))|.
    pub factorization_residual: T,
    /// worst deviation of mixed λ-moments from the product of pure ones.
    pub mixed_moment_residual: T,
    pub pass: bool,
}

/// Verify strong independence for x ∈ eNe, y ∈ fNf with e ⟂ f projections
/// in the centralizer: commutation of the lifted unitaries, exact
/// factorization of the characteristic functional, and factorization of
/// mixed moments.
pub fn independence_check<T: Real>(
    e: &AlgebraElement<T>,
    f: &AlgebraElement<T>,
    x: &AlgebraElement<T>,
    y: &AlgebraElement<T>,
    w: &Weight<T>,
) -> Result<IndependenceReport<T>> {
    for p in [e, f] {
        let pr = projection_residual(p).max(centralizer_residual(p, w));
        if pr > T::of(1e-12) {
            return Err(Error::NotCentralizerProjection(format!("residual {:.3e}", pr.to_f64_lossy())));
        }
    }
    if e.mul(f).max_abs() > T::of(1e-12) {
        return Err(Error::NotCentralizerProjection("corners are not orthogonal".into()));
    }
    // support: x = exe, y = fyf
    let sx = x.sub(&e.mul(x).mul(e)).max_abs();
    let sy = y.sub(&f.mul(y).mul(f)).max_abs();
    if sx.max(sy) > T::of(1e-10) * (T::one() + x.max_abs().max(y.max_abs())) {
        return Err(Error::OutOfRange("letters are not supported in their corners".into()));
    }
    let ux = x.exp_i()?;
    let uy = y.exp_i()?;
    // (b) characteristic functional factorizes exactly
    let joint = w.eval_minus_identity(&ux.mul(&uy))?.exp();
    let split = w.eval_minus_identity(&ux)?.exp() * w.eval_minus_identity(&uy)?.exp();
    let factorization_residual = (joint - split).norm();
    // (a) commutator of the two Γ actions on probe vectors
    let ctx = GnsContext::new(w);
    let m_cap = 6usize;
    let mut state = 0x1234_5678_9abc_def0u64;
    let mut lcg = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let mut commutator_norm = T::zero();
    for _ in 0..5 {
        let z = {
            let blocks = w
                .algebra()
                .block_dims()
                .iter()
                .map(|&d| {
                    let mut m = Mat::zeros(d);
                    for i in 0..d {
                        for j in 0..d {
                            m[(i, j)] = C::new(T::of(lcg()), T::of(lcg()));
                        }
                    }
                    m
                })
                .collect();
            AlgebraElement::from_blocks(blocks)
        };
        let probe = ctx.apply_lambda(&z, &ctx.vacuum(m_cap)?)?;
        let ab = ctx.apply_gamma(&ux, &ctx.apply_gamma(&uy, &probe)?)?;
        let ba = ctx.apply_gamma(&uy, &ctx.apply_gamma(&ux, &probe)?)?;
        let scale = ctx.norm(&probe).max(T::of(1e-6));
        commutator_norm = commutator_norm.max(ctx.norm(&ab.sub(&ba)) / scale);
    }
    // (c) mixed λ-moments factorize
    let mut mixed_moment_residual = T::zero();
    {
        let two = poisson_moment(&MomentQuery::new(w, vec![x.clone(), y.clone()])?)?;
        let expect = w.eval(x)? * w.eval(y)? + w.eval(&x.mul(y))?;
        mixed_moment_residual = mixed_moment_residual.max((two - expect).norm());
        // interleaved word (x, y, x, y) against the product of pure moments
        let mixed =
            poisson_moment(&MomentQuery::new(w, vec![x.clone(), y.clone(), x.clone(), y.clone()])?)?;
        let px = poisson_moment(&MomentQuery::new(w, vec![x.clone(), x.clone()])?)?;
        let py = poisson_moment(&MomentQuery::new(w, vec![y.clone(), y.clone()])?)?;
        mixed_moment_residual = mixed_moment_residual.max((mixed - px * py).norm());
    }
    let pass = commutator_norm <= T::of(1e-10)
        && factorization_residual <= T::of(1e-12)
        && mixed_moment_residual <= T::of(1e-10);
    Ok(IndependenceReport { commutator_norm, factorization_residual, mixed_moment_residual, pass })
}

/// Outcome of the UCP lift verification.
#[derive(Clone, Debug)]
pub struct UcpReport<T> {
    pub unital_residual: T,
    pub choi_defect: T,
    pub preservation_residual: T,
    /// max |φ_dst(Γ(T(e^{ix}))) − φ_src(Γ(e^{ix}))| over probe generators.
    pub state_preservation_residual: T,
    /// smallest eigenvalue of the Gram of dual-lifted words (≥ −tol).
    pub gram_psd_defect: T,
    pub pass: bool,
}

/// Check that a unital completely positive weight-preserving map lifts to a
/// state-preserving positive map on the word layer: state preservation is
/// read off the characteristic functional on Γ generators, and positivity
/// off the Gram of dual-lifted λ_∅ words.
pub fn ucp_lift_check<T: Real>(
    map: &LinearMapOnAlgebra<T>,
    w_src: &Weight<T>,
    w_dst: &Weight<T>,
    words: &[Vec<AlgebraElement<T>>],
    probes: &[AlgebraElement<T>],
) -> Result<UcpReport<T>> {
    let unital_residual = map.unital_residual();
    if unital_residual > T::of(1e-10) {
        return Err(Error::NotUnital(unital_residual.to_f64_lossy()));
    }
    let choi_defect = map.choi_defect();
    if choi_defect < -T::of(1e-10) {
        return Err(Error::NotCompletelyPositive(choi_defect.to_f64_lossy()));
    }
    let preservation_residual = check_weight_preserving(map, w_src, w_dst)?;
    if preservation_residual.to_f64_lossy() > PRESERVATION_TOL {
        return Err(Error::NotWeightPreserving(preservation_residual.to_f64_lossy()));
    }
    // (a) Poisson-state preservation through the characteristic functional
    let mut state_preservation_residual = T::zero();
    for h in probes {
        let u = h.exp_i()?;
        let lifted = w_dst.eval_minus_identity(&map.apply(&u)?)?.exp();
        let original = w_src.eval_minus_identity(&u)?.exp();
        state_preservation_residual = state_preservation_residual.max((lifted - original).norm());
    }
    // (b) positivity of the predual action on word spans: Gram of the
    // dual-lifted λ_∅ words under ω_src
    let mut gram_psd_defect = T::zero();
    if !words.is_empty() {
        let lifted: Vec<Vec<AlgebraElement<T>>> = words
            .iter()
            .map(|word| word.iter().map(|x| map.apply_dual(x)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let k = lifted.len();
        let mut gram = Mat::zeros(k);
        for i in 0..k {
            for j in 0..k {
                gram[(i, j)] = gram_empty(w_src, &lifted[i], &lifted[j])?;
            }
        }
        gram_psd_defect = gram.hermitize().min_eig_hermitian().min(T::zero());
    }
    let pass = state_preservation_residual <= T::of(1e-10) && gram_psd_defect >= -T::of(1e-9);
    Ok(UcpReport {
        unital_residual,
        choi_defect,
        preservation_residual,
        state_preservation_residual,
        gram_psd_defect,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::gram_empty;
    use crate::gns::adaptive_cap;
    use crate::testutil::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Unitary commuting with a diagonal density: diagonal phases.
    fn diagonal_phase_unitary(alg: &Algebra, next: &mut impl FnMut() -> f64) -> AlgebraElement<f64> {
        let blocks = alg
            .block_dims()
            .iter()
            .map(|&d| {
                let mut m = Mat::zeros(d);
                for i in 0..d {
                    let th = next() * 6.0;
                    m[(i, i)] = c(th.cos(), th.sin());
                }
                m
            })
            .collect();
        AlgebraElement::from_blocks(blocks)
    }

    #[test]
    fn weight_preservation_examples() {
        let mut next = rng_stream(401);
        let alg = Algebra::full(2);
        let w = Weight::diagonal(&[0.7f64, 0.5]).unwrap();
        // identity map
        let idm = LinearMapOnAlgebra::identity(&alg);
        assert!(check_weight_preserving(&idm, &w, &w).unwrap() < 1e-14);
        // density-commuting unitary conjugation
        let u = diagonal_phase_unitary(&alg, &mut next);
        let conj = LinearMapOnAlgebra::unitary_conjugation(&alg, &u);
        assert!(check_weight_preserving(&conj, &w, &w).unwrap() < 1e-12);
        // block embedding x ↦ x ⊕ 0 with restricted weight
        let big = Algebra::new(vec![2, 2]).unwrap();
        let embed = LinearMapOnAlgebra::from_function(&alg, &big, |x| {
            AlgebraElement::from_blocks(vec![x.blocks[0].clone(), Mat::zeros(2)])
        });
        let w_big = Weight::new(AlgebraElement::from_blocks(vec![
            Mat::diag_re(&[0.7, 0.5]),
            Mat::diag_re(&[0.4, 0.1]),
        ]))
        .unwrap();
        assert!(check_weight_preserving(&embed, &w, &w_big).unwrap() < 1e-14);
    }

    #[test]
    fn lift_preserves_grams_for_homomorphisms() {
        let mut next = rng_stream(409);
        let alg = Algebra::full(3);
        let w = Weight::diagonal(&[0.5f64, 0.3, 0.2]).unwrap();
        let u = diagonal_phase_unitary(&alg, &mut next);
        let conj = LinearMapOnAlgebra::unitary_conjugation(&alg, &u)
            .with_weight_dual(&w, &w)
            .unwrap();
        assert!(conj.homomorphism_residual() < 1e-12);
        let words: Vec<PoissonWord<f64>> = (0..3)
            .map(|_| {
                PoissonWord::new(
                    WordKind::LambdaEmpty,
                    vec![random_element(&alg, &mut next), random_element(&alg, &mut next)],
                )
                .unwrap()
            })
            .collect();
        let lifted: Vec<_> =
            words.iter().map(|wd| lift_on_words(&conj, wd, &w, &w).unwrap()).collect();
        for i in 0..3 {
            for j in 0..3 {
                let before = gram_empty(&w, &words[i].letters, &words[j].letters).unwrap();
                let after = gram_empty(&w, &lifted[i].letters, &lifted[j].letters).unwrap();
                assert!((before - after).norm() <= 1e-9, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn lift_trivial_and_offdiagonal_examples() {
        let alg = Algebra::full(2);
        let w = Weight::diagonal(&[0.6f64, 0.4]).unwrap();
        let idm = LinearMapOnAlgebra::identity(&alg).with_weight_dual(&w, &w).unwrap();
        let word = PoissonWord::new(WordKind::LambdaEmpty, vec![alg.matrix_unit(0, 0, 1)]).unwrap();
        let same = lift_on_words(&idm, &word, &w, &w).unwrap();
        assert!(same.letters[0].sub(&word.letters[0]).max_abs() < 1e-14);
        // diagonal compression kills the off-diagonal letter
        let e = LinearMapOnAlgebra::diagonal_compression(&alg).with_weight_dual(&w, &w).unwrap();
        let killed = lift_on_words(&e, &word, &w, &w).unwrap();
        assert!(killed.letters[0].max_abs() < 1e-14);
        // missing dual is an error
        let no_dual = LinearMapOnAlgebra::identity(&alg);
        assert!(matches!(lift_on_words(&no_dual, &word, &w, &w), Err(Error::MissingDual)));
    }

    #[test]
    fn conditional_expectation_lift_idempotent_and_orthogonal() {
        let mut next = rng_stream(419);
        let alg = Algebra::full(2);
        let w = Weight::diagonal(&[0.8f64, 0.45]).unwrap();
        let e = LinearMapOnAlgebra::diagonal_compression(&alg).with_weight_dual(&w, &w).unwrap();
        assert!(check_weight_preserving(&e, &w, &w).unwrap() < 1e-13);
        for _ in 0..4 {
            let word = PoissonWord::new(
                WordKind::LambdaEmpty,
                vec![random_element(&alg, &mut next), random_element(&alg, &mut next)],
            )
            .unwrap();
            let once = lift_on_words(&e, &word, &w, &w).unwrap();
            let twice = lift_on_words(&e, &once, &w, &w).unwrap();
            for (a, b) in once.letters.iter().zip(&twice.letters) {
                assert!(a.sub(b).max_abs() < 1e-13);
            }
            // Gram-orthogonality ⟨E u, v⟩ = ⟨E u, E v⟩
            let other = PoissonWord::new(
                WordKind::LambdaEmpty,
                vec![random_element(&alg, &mut next)],
            )
            .unwrap();
            let e_other = lift_on_words(&e, &other, &w, &w).unwrap();
            let lhs = gram_empty(&w, &once.letters, &other.letters).unwrap();
            let rhs = gram_empty(&w, &once.letters, &e_other.letters).unwrap();
            assert!((lhs - rhs).norm() <= 1e-9);
        }
    }

    #[test]
    fn functoriality_of_lifts() {
        let mut next = rng_stream(421);
        let alg = Algebra::full(2);
        let w = Weight::diagonal(&[0.6f64, 0.4]).unwrap();
        let u1 = diagonal_phase_unitary(&alg, &mut next);
        let u2 = diagonal_phase_unitary(&alg, &mut next);
        let t1 = LinearMapOnAlgebra::unitary_conjugation(&alg, &u1);
        let t2 = LinearMapOnAlgebra::unitary_conjugation(&alg, &u2);
        let composed = t1.compose(&t2).unwrap().with_weight_dual(&w, &w).unwrap();
        let word = PoissonWord::new(
            WordKind::LambdaEmpty,
            vec![random_element(&alg, &mut next), random_element(&alg, &mut next)],
        )
        .unwrap();
        let a = lift_on_words(&composed, &word, &w, &w).unwrap();
        let t2d = t2.clone().with_weight_dual(&w, &w).unwrap();
        let t1d = t1.clone().with_weight_dual(&w, &w).unwrap();
        let b = lift_on_words(&t1d, &lift_on_words(&t2d, &word, &w, &w).unwrap(), &w, &w).unwrap();
        for (x, y) in a.letters.iter().zip(&b.letters) {
            assert!(x.sub(y).max_abs() < 1e-12);
        }
    }

    #[test]
    fn corner_projection_examples() {
        let mut next = rng_stream(431);
        let alg = Algebra::full(2);
        let w = Weight::diagonal(&[0.7f64, 0.3]).unwrap();
        let x = random_element(&alg, &mut next);
        let word = PoissonWord::new(WordKind::LambdaEmpty, vec![x.clone()]).unwrap();
        // e = 1: word unchanged
        let full = corner_project(&alg.identity(), &word, &w).unwrap();
        let kept = full.iter().find(|t| t.kept_mask == 1).unwrap();
        assert!((kept.coefficient - c(1.0, 0.0)).norm() < 1e-14);
        assert!(kept.word.letters[0].sub(&x).max_abs() < 1e-13);
        let dropped = full.iter().find(|t| t.kept_mask == 0).unwrap();
        assert!(dropped.coefficient.norm() < 1e-14, "ω((1−1)x) = 0");
        // e = 0: everything integrated out, Π ω(x_i) times the vacuum word
        let zero = alg.zero::<f64>();
        let none = corner_project(&zero, &word, &w).unwrap();
        let vac = none.iter().find(|t| t.kept_mask == 0).unwrap();
        assert!((vac.coefficient - w.eval(&x).unwrap()).norm() < 1e-13);
        // M₂, e = diag(1,0): λ_∅(x) ↦ ω((1−e)x)·vacuum + λ_∅(exe)
        let e = AlgebraElement::from_blocks(vec![Mat::diag_re(&[1.0, 0.0])]);
        let terms = corner_project(&e, &word, &w).unwrap();
        let t0 = terms.iter().find(|t| t.kept_mask == 0).unwrap();
        let one_minus_e = alg.identity::<f64>().sub(&e);
        assert!((t0.coefficient - w.eval(&one_minus_e.mul(&x)).unwrap()).norm() < 1e-13);
        let t1 = terms.iter().find(|t| t.kept_mask == 1).unwrap();
        assert!(t1.word.letters[0].sub(&e.mul(&x).mul(&e)).max_abs() < 1e-13);
        // non-centralizer projection rejected
        let skew = AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(0.5, 0.0), c(0.5, 0.0)],
            vec![c(0.5, 0.0), c(0.5, 0.0)],
        ])]);
        assert!(corner_project(&skew, &word, &w).is_err());
    }

    #[test]
    fn corner_projection_matches_least_squares_oracle() {
        let mut next = rng_stream(433);
        let w = Weight::diagonal(&[0.5f64, 0.3, 0.2]).unwrap();
        let alg = w.algebra().clone();
        let ctx = GnsContext::new(&w);
        let e = AlgebraElement::from_blocks(vec![Mat::diag_re(&[1.0, 1.0, 0.0])]);
        let cap = adaptive_cap(&w, 1e-8, 4, 1.0, alg.linear_dim()).unwrap();
        for len in 1..=2usize {
            let letters: Vec<_> = (0..len).map(|_| random_contraction(&alg, &mut next)).collect();
            let word = PoissonWord::new(WordKind::LambdaEmpty, letters).unwrap();
            let r = corner_project_oracle_residual(&ctx, &e, &word, cap).unwrap();
            assert!(r <= 1e-8, "corner oracle residual {r} at {len} letters");
        }
    }

    #[test]
    fn independence_examples() {
        let w = Weight::diagonal(&[0.5f64, 0.5]).unwrap();
        let alg = w.algebra().clone();
        let e = AlgebraElement::from_blocks(vec![Mat::diag_re(&[1.0, 0.0])]);
        let f = AlgebraElement::from_blocks(vec![Mat::diag_re(&[0.0, 1.0])]);
        // y = 0 passes trivially
        let x = e.scale(c(0.8, 0.0));
        let rep = independence_check(&e, &f, &x, &alg.zero(), &w).unwrap();
        assert!(rep.pass);
        // x = t·e, y = s·f: both sides equal the split product exactly
        let y = f.scale(c(-1.3, 0.0));
        let rep = independence_check(&e, &f, &x, &y, &w).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.factorization_residual <= 1e-12);
        assert!(rep.commutator_norm <= 1e-10);
        // support violation rejected
        let bad = alg.identity::<f64>();
        assert!(independence_check(&e, &f, &bad, &y, &w).is_err());
    }

    #[test]
    fn independence_on_three_dim_corners() {
        let mut next = rng_stream(439);
        let w = Weight::diagonal(&[0.4f64, 0.3, 0.3]).unwrap();
        let e = AlgebraElement::from_blocks(vec![Mat::diag_re(&[1.0, 1.0, 0.0])]);
        let f = AlgebraElement::from_blocks(vec![Mat::diag_re(&[0.0, 0.0, 1.0])]);
        for _ in 0..3 {
            // Hermitian letters supported in the corners
            let h = random_hermitian(w.algebra(), &mut next);
            let x = e.mul(&h).mul(&e);
            let mut yb = Mat::zeros(3);
            yb[(2, 2)] = c(next(), 0.0);
            let y = AlgebraElement::from_blocks(vec![yb]);
            let rep = independence_check(&e, &f, &x, &y, &w).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn split_state_tensor_identity() {
        // orthogonal centralizer corners covering 1: the Gram over mixed
        // words equals the tensor product of corner Grams
        let mut next = rng_stream(443);
        let w = Weight::diagonal(&[0.4f64, 0.2, 0.4]).unwrap();
        let e = AlgebraElement::from_blocks(vec![Mat::diag_re(&[1.0, 1.0, 0.0])]);
        let f = AlgebraElement::from_blocks(vec![Mat::diag_re(&[0.0, 0.0, 1.0])]);
        fn corner(
            w: &Weight<f64>,
            p: &AlgebraElement<f64>,
            next: &mut impl FnMut() -> f64,
        ) -> AlgebraElement<f64> {
            let h = random_element(w.algebra(), next);
            p.mul(&h).mul(p)
        }
        for _ in 0..3 {
            let xs: Vec<_> = (0..2).map(|_| corner(&w, &e, &mut next)).collect();
            let ys: Vec<_> = (0..2).map(|_| corner(&w, &f, &mut next)).collect();
            let xs2: Vec<_> = (0..2).map(|_| corner(&w, &e, &mut next)).collect();
            let ys2: Vec<_> = (0..2).map(|_| corner(&w, &f, &mut next)).collect();
            let mut mixed1 = xs.clone();
            mixed1.extend(ys.iter().cloned());
            let mut mixed2 = xs2.clone();
            mixed2.extend(ys2.iter().cloned());
            let full = gram_empty(&w, &mixed1, &mixed2).unwrap();
            let parts = gram_empty(&w, &xs, &xs2).unwrap() * gram_empty(&w, &ys, &ys2).unwrap();
            assert!((full - parts).norm() <= 1e-9, "split defect {}", (full - parts).norm());
        }
    }

    #[test]
    fn ucp_examples() {
        let mut next = rng_stream(449);
        let alg = Algebra::full(2);
        let w = Weight::diagonal(&[0.6f64, 0.4]).unwrap();
        let probes: Vec<_> = (0..5).map(|_| random_contraction(&alg, &mut next)).collect();
        let words: Vec<Vec<AlgebraElement<f64>>> = vec![
            vec![random_element(&alg, &mut next)],
            vec![random_element(&alg, &mut next), random_element(&alg, &mut next)],
        ];
        // identity: all checks exact
        let idm = LinearMapOnAlgebra::identity(&alg).with_weight_dual(&w, &w).unwrap();
        let rep = ucp_lift_check(&idm, &w, &w, &words, &probes).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.state_preservation_residual < 1e-12);
        // conditional expectation onto the diagonal
        let e = LinearMapOnAlgebra::diagonal_compression(&alg).with_weight_dual(&w, &w).unwrap();
        let rep = ucp_lift_check(&e, &w, &w, &words, &probes).unwrap();
        assert!(rep.pass, "{rep:?}");
        // mixture ½·id + ½·(unitary conj) with a density-commuting unitary
        let u = diagonal_phase_unitary(&alg, &mut next);
        let conj = LinearMapOnAlgebra::unitary_conjugation(&alg, &u);
        let mix = LinearMapOnAlgebra::from_function(&alg, &alg, |x| {
            x.scale(c(0.5, 0.0)).add(&conj.apply(x).unwrap().scale(c(0.5, 0.0)))
        })
        .with_weight_dual(&w, &w)
        .unwrap();
        assert!(mix.choi_defect() >= -1e-12);
        let rep = ucp_lift_check(&mix, &w, &w, &words, &probes).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.state_preservation_residual <= 1e-10);
        // a non-CP map is rejected: the transpose
        let transpose = LinearMapOnAlgebra::from_function(&alg, &alg, |x| {
            let m = &x.blocks[0];
            let mut t = Mat::zeros(2);
            for i in 0..2 {
                for j in 0..2 {
                    t[(i, j)] = m[(j, i)];
                }
            }
            AlgebraElement::from_blocks(vec![t])
        });
        assert!(transpose.choi_defect() < -0.5);
        assert!(matches!(
            ucp_lift_check(&transpose, &w, &w, &words, &probes),
            Err(Error::NotCompletelyPositive(_))
        ));
    }

    #[test]
    fn weight_dual_forms_a_dual_pair() {
        let mut next = rng_stream(457);
        let alg = Algebra::full(2);
        let w = Weight::new(AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(0.8, 0.0), c(0.1, 0.05)],
            vec![c(0.1, -0.05), c(0.3, 0.0)],
        ])]))
        .unwrap();
        let e = LinearMapOnAlgebra::diagonal_compression(&alg).with_weight_dual(&w, &w).unwrap();
        for _ in 0..10 {
            let x = random_element(&alg, &mut next);
            let y = random_element(&alg, &mut next);
            let lhs = w.eval(&e.apply(&x).unwrap().mul(&y)).unwrap();
            let rhs = w.eval(&x.mul(&e.apply_dual(&y).unwrap())).unwrap();
            assert!((lhs - rhs).norm() < 1e-11, "dual pairing defect {}", (lhs - rhs).norm());
        }
    }
}
