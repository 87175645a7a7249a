//! Finite-dimensional von Neumann algebras (direct sums of matrix blocks),
//! faithful weights, modular flow, and relative modular data.
//!
//! A weight is represented by its positive-definite density d: ω(x) = Tr(d x).
//! The modular flow σ_t(x) = d^{it} x d^{-it} and its analytic continuation
//! are evaluated exactly in the eigenbasis of the density, so KMS-type
//! identities hold to rounding error rather than to a series truncation.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{cim, cre, czero, Real, C};
use num_complex::Complex;

/// Direct sum of full matrix algebras with the given block dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    dims: Vec<usize>,
}

impl Algebra {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::OutOfRange("block dimensions must all be ≥ 1".into()));
        }
        Ok(Algebra { dims })
    }

    /// Single full matrix block M_d.
    pub fn full(d: usize) -> Self {
        Algebra::new(vec![d]).expect("d ≥ 1")
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    /// Dimension of the algebra as a complex vector space, Σ d_k².
    pub fn linear_dim(&self) -> usize {
        self.dims.iter().map(|d| d * d).sum()
    }

    /// Σ d_k: size of the matrix when blocks are laid out block-diagonally.
    pub fn matrix_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn zero<T: Real>(&self) -> AlgebraElement<T> {
        AlgebraElement { blocks: self.dims.iter().map(|&d| Mat::zeros(d)).collect() }
    }

    pub fn identity<T: Real>(&self) -> AlgebraElement<T> {
        AlgebraElement { blocks: self.dims.iter().map(|&d| Mat::identity(d)).collect() }
    }

    /// Matrix unit e_{ij} inside block `b`.
    pub fn matrix_unit<T: Real>(&self, b: usize, i: usize, j: usize) -> AlgebraElement<T> {
        let mut x = self.zero();
        x.blocks[b][(i, j)] = cre(T::one());
        x
    }

    pub fn check_element<T: Real>(&self, x: &AlgebraElement<T>) -> Result<()> {
        if x.blocks.len() != self.dims.len()
            || x.blocks.iter().zip(&self.dims).any(|(m, &d)| m.dim() != d)
        {
            return Err(Error::DimensionMismatch(format!(
                "element has block shape {:?}, algebra has {:?}",
                x.blocks.iter().map(|m| m.dim()).collect::<Vec<_>>(),
                self.dims
            )));
        }
        Ok(())
    }
}

/// Element of a block-matrix algebra: one complex matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<T> {
    pub blocks: Vec<Mat<T>>,
}

impl<T: Real> AlgebraElement<T> {
    pub fn from_blocks(blocks: Vec<Mat<T>>) -> Self {
        AlgebraElement { blocks }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.blocks.iter().map(|m| m.dim()).collect()
    }

    fn zip(&self, other: &Self, f: impl Fn(&Mat<T>, &Mat<T>) -> Mat<T>) -> Self {
        assert_eq!(self.blocks.len(), other.blocks.len(), "block count mismatch");
        AlgebraElement {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.mul(b))
    }

    pub fn scale(&self, c: C<T>) -> Self {
        AlgebraElement { blocks: self.blocks.iter().map(|m| m.scale(c)).collect() }
    }

    pub fn adjoint(&self) -> Self {
        AlgebraElement { blocks: self.blocks.iter().map(|m| m.adjoint()).collect() }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Operator norm: max over blocks of the largest singular value.
    pub fn op_norm(&self) -> T {
        self.blocks.iter().fold(T::zero(), |acc, m| acc.max(m.op_norm()))
    }

    pub fn max_abs(&self) -> T {
        self.blocks.iter().fold(T::zero(), |acc, m| acc.max(m.max_abs()))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.blocks.iter().all(|m| m.is_hermitian(tol))
    }

    pub fn is_zero(&self, tol: T) -> bool {
        self.max_abs() <= tol
    }

    /// Blockwise spectral calculus on a Hermitian element.
    pub fn func_hermitian(&self, f: impl Fn(T) -> C<T> + Copy) -> Self {
        AlgebraElement { blocks: self.blocks.iter().map(|m| m.func_hermitian(f)).collect() }
    }

    /// `e^{ix}` for Hermitian `x`, exact per block in the eigenbasis.
    pub fn exp_i(&self) -> Result<Self> {
        let dev = self
            .blocks
            .iter()
            .fold(T::zero(), |acc, m| acc.max(m.sub(&m.adjoint()).max_abs()));
        if dev > T::of(1e-10) * (T::one() + self.max_abs()) {
            return Err(Error::NotHermitian(dev.to_f64_lossy()));
        }
        Ok(self.func_hermitian(|l| Complex::new(l.cos(), l.sin())))
    }
}

/// Faithful positive functional ω(x) = Tr(d_ω x) with positive-definite
/// density; the block eigendecompositions of the density are computed once
/// and reused by the modular machinery.
#[derive(Clone, Debug)]
pub struct Weight<T> {
    algebra: Algebra,
    density: AlgebraElement<T>,
    mass: T,
    eig: Vec<(Vec<T>, Mat<T>)>,
}

impl<T: Real> Weight<T> {
    /// Build a weight from its density. Fails unless the density is
    /// Hermitian with strictly positive spectrum (faithfulness).
    pub fn new(density: AlgebraElement<T>) -> Result<Self> {
        let algebra = Algebra::new(density.shape())?;
        let dev = density
            .blocks
            .iter()
            .fold(T::zero(), |acc, m| acc.max(m.sub(&m.adjoint()).max_abs()));
        if dev > T::of(1e-10) * (T::one() + density.max_abs()) {
            return Err(Error::NotHermitian(dev.to_f64_lossy()));
        }
        let mut eig = Vec::with_capacity(density.blocks.len());
        for m in &density.blocks {
            let (lam, v) = m.hermitize().eig_hermitian();
            if let Some(&min) = lam.first() {
                if min <= T::zero() {
                    return Err(Error::NotFaithful(min.to_f64_lossy()));
                }
            }
            eig.push((lam, v));
        }
        let mass = eig.iter().map(|(lam, _)| lam.iter().fold(T::zero(), |a, &b| a + b)).fold(
            T::zero(),
            |a, b| a + b,
        );
        Ok(Weight { algebra, density, mass, eig })
    }

    /// Tracial state: density = 1/Σd_k, so ω(1) = 1 and σ_t = id.
    pub fn tracial(algebra: &Algebra) -> Self {
        let total = T::of(algebra.matrix_dim() as f64);
        let density = algebra.identity::<T>().scale(cre(T::one() / total));
        Weight::new(density).expect("tracial density is faithful")
    }

    /// Weight with diagonal density entries, single block.
    pub fn diagonal(entries: &[T]) -> Result<Self> {
        Weight::new(AlgebraElement::from_blocks(vec![Mat::diag_re(entries)]))
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn density(&self) -> &AlgebraElement<T> {
        &self.density
    }

    /// ω(1) = Tr(d_ω).
    pub fn mass(&self) -> T {
        self.mass
    }

    /// Density eigendecomposition per block (eigenvalues ascending).
    pub fn density_eig(&self) -> &[(Vec<T>, Mat<T>)] {
        &self.eig
    }

    /// Rescale the weight: (cω)(x) = c·ω(x).
    pub fn scaled(&self, c: T) -> Result<Self> {
        Weight::new(self.density.scale(cre(c)))
    }

    /// ω(x) = Tr(d_ω x).
    pub fn eval(&self, x: &AlgebraElement<T>) -> Result<C<T>> {
        self.algebra.check_element(x)?;
        let mut acc = czero();
        for (d, m) in self.density.blocks.iter().zip(&x.blocks) {
            acc += d.mul(m).trace();
        }
        Ok(acc)
    }

    /// ω(x − 1) = ω(x) − ω(1); the combination every characteristic
    /// functional uses.
    pub fn eval_minus_identity(&self, x: &AlgebraElement<T>) -> Result<C<T>> {
        Ok(self.eval(x)? - cre(self.mass))
    }

    /// d_ω^{iz} for complex z = t + is, blockwise in the eigenbasis.
    fn density_power_iz(&self, t: T, s: T) -> AlgebraElement<T> {
        let blocks = self
            .eig
            .iter()
            .map(|(lam, v)| {
                let n = lam.len();
                let mut out = Mat::zeros(n);
                for k in 0..n {
                    // λ^{i(t+is)} = e^{(it - s)·ln λ}
                    let ln = lam[k].ln();
                    let factor = (Complex::new(-s * ln, t * ln)).exp();
                    for i in 0..n {
                        let vik = v[(i, k)] * factor;
                        for j in 0..n {
                            out[(i, j)] += vik * v[(j, k)].conj();
                        }
                    }
                }
                out
            })
            .collect();
        AlgebraElement { blocks }
    }

    /// d_ω^{it} (a unitary for real t).
    pub fn density_power_it(&self, t: T) -> AlgebraElement<T> {
        self.density_power_iz(t, T::zero())
    }
}

/// σ_t^ω(x) = d^{it} x d^{-it}, evaluated entrywise in the density eigenbasis.
pub fn modular_flow<T: Real>(w: &Weight<T>, x: &AlgebraElement<T>, t: T) -> Result<AlgebraElement<T>> {
    modular_flow_analytic(w, x, Complex::new(t, T::zero()))
}

/// σ_z^ω(x) for complex time z = t + is: entrywise multiplication by
/// (λ_j/λ_k)^{iz} in the density eigenbasis. Exact — no series truncation.
pub fn modular_flow_analytic<T: Real>(
    w: &Weight<T>,
    x: &AlgebraElement<T>,
    z: C<T>,
) -> Result<AlgebraElement<T>> {
    w.algebra().check_element(x)?;
    let blocks = w
        .eig
        .iter()
        .zip(&x.blocks)
        .map(|((lam, v), xb)| {
            let n = lam.len();
            // y = V* x V, multiply entry (j,k) by (λ_j/λ_k)^{iz}, rotate back.
            let mut y = v.adjoint().mul(xb).mul(v);
            for j in 0..n {
                for k in 0..n {
                    let dln = lam[j].ln() - lam[k].ln();
                    // (λ_j/λ_k)^{iz} = e^{iz·dln}
                    let factor = (cim(dln) * z).exp();
                    y[(j, k)] *= factor;
                }
            }
            v.mul(&y).mul(&v.adjoint())
        })
        .collect();
    Ok(AlgebraElement { blocks })
}

/// Connes cocycle (Dρ:Dψ)_t = d_ρ^{it} d_ψ^{-it}.
pub fn connes_cocycle<T: Real>(rho: &Weight<T>, psi: &Weight<T>, t: T) -> Result<AlgebraElement<T>> {
    if rho.algebra() != psi.algebra() {
        return Err(Error::DimensionMismatch("cocycle weights live on different algebras".into()));
    }
    Ok(rho.density_power_it(t).mul(&psi.density_power_it(-t)))
}

/// max{‖x‖, ω(x*x)^{1/2}, ω(xx*)^{1/2}, |ω(x)|}.
pub fn triple_norm<T: Real>(w: &Weight<T>, x: &AlgebraElement<T>) -> Result<T> {
    w.algebra().check_element(x)?;
    let op = x.op_norm();
    let l2r = w.eval(&x.adjoint().mul(x))?.re.max(T::zero()).sqrt();
    let l2l = w.eval(&x.mul(&x.adjoint()))?.re.max(T::zero()).sqrt();
    let lin = w.eval(x)?.norm();
    Ok(op.max(l2r).max(l2l).max(lin))
}

/// Weight variant of the triple norm, with the L₁ factorization bound in
/// place of |ω(x)|. The L₁ norm is an infimum over factorizations; here it
/// is bounded above through the polar decomposition x = u|x|, factored as
/// (u|x|^{1/2})·(|x|^{1/2}), which is all the growth estimates need.
pub fn triple_norm_weighted<T: Real>(w: &Weight<T>, x: &AlgebraElement<T>) -> Result<T> {
    w.algebra().check_element(x)?;
    let op = x.op_norm();
    let l2r = w.eval(&x.adjoint().mul(x))?.re.max(T::zero()).sqrt();
    let l2l = w.eval(&x.mul(&x.adjoint()))?.re.max(T::zero()).sqrt();
    // |x| = (x*x)^{1/2}, |x|⁺ its pseudo-inverse; ω(x|x|⁺x*)^{1/2}·ω(|x|)^{1/2}
    let floor = T::of(1e-14) * (T::one() + x.max_abs() * x.max_abs());
    let absx = x.adjoint().mul(x).func_hermitian(|l| cre(l.max(T::zero()).sqrt()));
    let pinv = absx.func_hermitian(|l| if l > floor { cre(T::one() / l) } else { czero() });
    let left = w.eval(&x.mul(&pinv).mul(&x.adjoint()))?.re.max(T::zero()).sqrt();
    let right = w.eval(&absx)?.re.max(T::zero()).sqrt();
    Ok(op.max(l2r).max(l2l).max(left * right))
}

/// Modular data of a weight: density spectrum per block and the spectrum of
/// the modular operator Δ_ω (eigenvalue ratios within each block).
#[derive(Clone, Debug)]
pub struct ModularData<T> {
    /// Density eigenvalues per block, ascending.
    pub block_eigenvalues: Vec<Vec<T>>,
    /// Sp(Δ_ω): ratios μ_i/μ_j, deduplicated, sorted ascending. Contains 1
    /// and is closed under inversion.
    pub delta_spectrum: Vec<T>,
}

impl<T: Real> ModularData<T> {
    pub fn of(w: &Weight<T>) -> Self {
        let block_eigenvalues: Vec<Vec<T>> =
            w.density_eig().iter().map(|(lam, _)| lam.clone()).collect();
        // Merge eigenvalues closer than 1e-12 relative before forming ratios;
        // ratio sets are unstable under spurious splitting.
        let merge_tol = T::of(1e-12);
        let mut ratios: Vec<T> = vec![T::one()];
        for lam in &block_eigenvalues {
            let mut merged: Vec<T> = Vec::new();
            for &l in lam {
                match merged.last() {
                    Some(&prev) if (l - prev).abs() <= merge_tol * prev.abs() => {}
                    _ => merged.push(l),
                }
            }
            for i in 0..merged.len() {
                for j in 0..merged.len() {
                    if i != j {
                        ratios.push(merged[i] / merged[j]);
                    }
                }
            }
        }
        ratios.sort_by(|a, b| a.partial_cmp(b).expect("ratio NaN"));
        let rel_tol = T::of(1e-10);
        let mut delta_spectrum: Vec<T> = Vec::new();
        for r in ratios {
            match delta_spectrum.last() {
                Some(&prev) if (r - prev).abs() <= rel_tol * prev.abs() => {}
                _ => delta_spectrum.push(r),
            }
        }
        ModularData { block_eigenvalues, delta_spectrum }
    }
}

/// Relative modular data of a pair of faithful weights on the same algebra:
/// the superoperator x ↦ d_ρ x d_ψ^{-1} on the ψ-GNS inner product
/// ⟨a,b⟩ = Tr(d_ψ a* b), together with the Connes cocycle.
#[derive(Clone, Debug)]
pub struct RelativeModularData<T> {
    rho: Weight<T>,
    psi: Weight<T>,
}

impl<T: Real> RelativeModularData<T> {
    pub fn new(rho: Weight<T>, psi: Weight<T>) -> Result<Self> {
        if rho.algebra() != psi.algebra() {
            return Err(Error::DimensionMismatch("relative modular data needs one algebra".into()));
        }
        Ok(RelativeModularData { rho, psi })
    }

    /// Δ_{ρ,ψ} x = d_ρ x d_ψ^{-1}.
    pub fn apply(&self, x: &AlgebraElement<T>) -> Result<AlgebraElement<T>> {
        self.psi.algebra().check_element(x)?;
        let psi_inv = self.psi.density.func_hermitian(|l| cre(T::one() / l));
        Ok(self.rho.density.mul(x).mul(&psi_inv))
    }

    /// u_t = (Dρ:Dψ)_t.
    pub fn cocycle(&self, t: T) -> AlgebraElement<T> {
        connes_cocycle(&self.rho, &self.psi, t).expect("weights checked at construction")
    }

    pub fn rho(&self) -> &Weight<T> {
        &self.rho
    }

    pub fn psi(&self) -> &Weight<T> {
        &self.psi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn m2() -> Algebra {
        Algebra::full(2)
    }

    #[test]
    fn weight_eval_examples() {
        // normalized density: mass of the identity is 1
        let w = Weight::diagonal(&[0.3, 0.7]).unwrap();
        let one = w.algebra().identity::<f64>();
        assert!((w.eval(&one).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        // zero element
        assert_eq!(w.eval(&w.algebra().zero()).unwrap(), c(0.0, 0.0));
        // traceless under the tracial weight
        let tr = Weight::<f64>::tracial(&m2());
        let x = AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])]);
        assert!((tr.eval(&x).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn weight_eval_conjugate_symmetric() {
        let w = Weight::diagonal(&[0.9, 0.4]).unwrap();
        let x = AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(0.3, 0.2), c(-1.0, 0.4)],
            vec![c(0.9, -0.1), c(0.2, 0.7)],
        ])]);
        let a = w.eval(&x.adjoint()).unwrap();
        let b = w.eval(&x).unwrap().conj();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn weight_rejects_non_faithful_density() {
        let bad = AlgebraElement::from_blocks(vec![Mat::diag_re(&[1.0, 0.0])]);
        assert!(matches!(Weight::new(bad), Err(Error::NotFaithful(_))));
    }

    #[test]
    fn faithfulness_on_random_elements() {
        let w = Weight::diagonal(&[1.3, 0.2, 0.5]).unwrap();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for _ in 0..100 {
            let mut m = Mat::zeros(3);
            for i in 0..3 {
                for j in 0..3 {
                    m[(i, j)] = c(next(), next());
                }
            }
            let x = AlgebraElement::from_blocks(vec![m]);
            if x.max_abs() < 1e-6 {
                continue;
            }
            let v = w.eval(&x.adjoint().mul(&x)).unwrap();
            assert!(v.re > 0.0 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn triple_norm_examples() {
        let tr = Weight::<f64>::tracial(&m2());
        let one = tr.algebra().identity::<f64>();
        assert!((triple_norm(&tr, &one).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(triple_norm(&tr, &tr.algebra().zero()).unwrap(), 0.0);
        // density diag(2,1), x = diag(1,0): max{1, √2, √2, 2} = 2
        let w = Weight::diagonal(&[2.0f64, 1.0]).unwrap();
        let x = AlgebraElement::from_blocks(vec![Mat::diag_re(&[1.0, 0.0])]);
        assert!((triple_norm(&w, &x).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_triple_norm_dominates_linear_term() {
        let w = Weight::diagonal(&[0.8, 0.5, 0.2]).unwrap();
        let x = AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(0.1, 0.0), c(0.4, -0.2), c(0.0, 0.0)],
            vec![c(0.4, 0.2), c(-0.3, 0.0), c(0.2, 0.1)],
            vec![c(0.0, 0.0), c(0.2, -0.1), c(0.5, 0.0)],
        ])]);
        let tw = triple_norm_weighted(&w, &x).unwrap();
        assert!(tw >= w.eval(&x).unwrap().norm() - 1e-12);
        assert!(tw >= triple_norm(&w, &x).unwrap() - 1e-12 || tw >= 0.0);
    }

    #[test]
    fn modular_flow_examples() {
        // tracial ⇒ trivial flow
        let tr = Weight::<f64>::tracial(&m2());
        let x = AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(0.3, 0.0), c(0.2, 0.5)],
            vec![c(0.1, -0.4), c(-0.2, 0.0)],
        ])]);
        let fx = modular_flow(&tr, &x, 1.7).unwrap();
        assert!(fx.sub(&x).max_abs() < 1e-13);
        // t = 0 ⇒ identity
        let w = Weight::diagonal(&[2.0, 0.5]).unwrap();
        let f0 = modular_flow(&w, &x, 0.0).unwrap();
        assert!(f0.sub(&x).max_abs() < 1e-13);
        // matrix unit: σ_t(e_12) = (a/b)^{it} e_12
        let e12 = w.algebra().matrix_unit::<f64>(0, 0, 1);
        let t = 0.7;
        let got = modular_flow(&w, &e12, t).unwrap();
        let factor = (c(0.0, t * (2.0f64 / 0.5).ln())).exp();
        let expect = e12.scale(factor);
        assert!(got.sub(&expect).max_abs() < 1e-13);
    }

    #[test]
    fn modular_flow_preserves_weight_and_norm() {
        let w = Weight::diagonal(&[1.1, 0.45, 0.22]).unwrap();
        let x = AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(0.5, 0.0), c(0.2, 0.3), c(0.0, -0.1)],
            vec![c(0.2, -0.3), c(-0.4, 0.0), c(0.6, 0.0)],
            vec![c(0.0, 0.1), c(0.6, 0.0), c(0.1, 0.0)],
        ])]);
        for &t in &[0.1, 1.0, 7.0] {
            let fx = modular_flow(&w, &x, t).unwrap();
            assert!((w.eval(&fx).unwrap() - w.eval(&x).unwrap()).norm() < 1e-10);
            assert!((fx.op_norm() - x.op_norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn modular_flow_group_law() {
        let w = Weight::diagonal(&[0.9, 0.33]).unwrap();
        let x = AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(0.3, 0.0), c(0.7, -0.2)],
            vec![c(-0.1, 0.4), c(0.0, 0.0)],
        ])]);
        let (t, s) = (0.6, -1.3);
        let a = modular_flow(&w, &modular_flow(&w, &x, s).unwrap(), t).unwrap();
        let b = modular_flow(&w, &x, t + s).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-12);
    }

    #[test]
    fn kms_identity_at_base_level() {
        // ω(σ_{t+i}(x)·y) = ω(y·σ_t(x)) exactly in the eigenbasis.
        let w = Weight::new(AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(0.9, 0.0), c(0.2, 0.1)],
            vec![c(0.2, -0.1), c(0.4, 0.0)],
        ])]))
        .unwrap();
        let x = AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(0.2, 0.0), c(0.5, -0.3)],
            vec![c(-0.4, 0.2), c(0.6, 0.0)],
        ])]);
        let y = AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(-0.3, 0.1), c(0.0, 0.7)],
            vec![c(0.2, 0.0), c(0.1, -0.2)],
        ])]);
        for &t in &[0.0, 0.4, 2.5] {
            let xc = modular_flow_analytic(&w, &x, c(t, 1.0)).unwrap();
            let lhs = w.eval(&xc.mul(&y)).unwrap();
            let rhs = w.eval(&y.mul(&modular_flow(&w, &x, t).unwrap())).unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "KMS residual {} at t={}", (lhs - rhs).norm(), t);
        }
    }

    #[test]
    fn cocycle_examples_and_identity() {
        let rho = Weight::diagonal(&[1.4, 0.3]).unwrap();
        let psi = Weight::diagonal(&[0.6, 0.8]).unwrap();
        // ρ = ψ ⇒ identity; t = 0 ⇒ identity
        let id = connes_cocycle(&rho, &rho, 0.9).unwrap();
        assert!(id.sub(&rho.algebra().identity()).max_abs() < 1e-13);
        let id0 = connes_cocycle(&rho, &psi, 0.0).unwrap();
        assert!(id0.sub(&rho.algebra().identity()).max_abs() < 1e-13);
        // commuting diagonal densities: diag((a_i/b_i)^{it})
        let t = 1.3;
        let u = connes_cocycle(&rho, &psi, t).unwrap();
        let expect = AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![(c(0.0, t * (1.4f64 / 0.6).ln())).exp(), c(0.0, 0.0)],
            vec![c(0.0, 0.0), (c(0.0, t * (0.3f64 / 0.8).ln())).exp()],
        ])]);
        assert!(u.sub(&expect).max_abs() < 1e-12);
        // unitarity
        assert!(u.mul(&u.adjoint()).sub(&rho.algebra().identity()).max_abs() < 1e-12);
    }

    #[test]
    fn cocycle_chain_rule_against_flow() {
        // u_{t+s} = u_t σ_t^ψ(u_s) for non-commuting faithful pairs.
        let rho = Weight::new(AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(1.0, 0.0), c(0.3, 0.2)],
            vec![c(0.3, -0.2), c(0.5, 0.0)],
        ])]))
        .unwrap();
        let psi = Weight::new(AlgebraElement::from_blocks(vec![Mat::from_rows(&[
            vec![c(0.7, 0.0), c(-0.1, 0.1)],
            vec![c(-0.1, -0.1), c(0.9, 0.0)],
        ])]))
        .unwrap();
        let (t, s) = (0.8, -0.5);
        let lhs = connes_cocycle(&rho, &psi, t + s).unwrap();
        let us = connes_cocycle(&rho, &psi, s).unwrap();
        let rhs = connes_cocycle(&rho, &psi, t)
            .unwrap()
            .mul(&modular_flow(&psi, &us, t).unwrap());
        assert!(lhs.sub(&rhs).max_abs() < 1e-10);
    }

    #[test]
    fn modular_data_spectrum_properties() {
        let w = Weight::diagonal(&[1.0f64, 0.5]).unwrap();
        let md = ModularData::of(&w);
        let expect = [0.5f64, 1.0, 2.0];
        assert_eq!(md.delta_spectrum.len(), 3);
        for (a, b) in md.delta_spectrum.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        // 1 in spectrum, inversion-closed
        assert!(md.delta_spectrum.iter().any(|&r| (r - 1.0).abs() < 1e-12));
        for &r in &md.delta_spectrum {
            assert!(md.delta_spectrum.iter().any(|&q| (q - 1.0 / r).abs() < 1e-9));
        }
    }

    #[test]
    fn relative_modular_superoperator() {
        let rho = Weight::diagonal(&[1.0, 0.25]).unwrap();
        let psi = Weight::diagonal(&[0.5, 0.5]).unwrap();
        let rel = RelativeModularData::new(rho, psi).unwrap();
        let e12 = rel.psi().algebra().matrix_unit::<f64>(0, 0, 1);
        let got = rel.apply(&e12).unwrap();
        // d_ρ e12 d_ψ^{-1} = (1.0 / 0.5) e12
        assert!(got.sub(&e12.scale(c(2.0, 0.0))).max_abs() < 1e-13);
    }
}
