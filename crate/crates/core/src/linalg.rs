//! Dense complex kernels for the small matrices that appear as blocks of a
//! finite-dimensional von Neumann algebra.
//!
//! Blocks here are tiny (d ≤ 6 in practice), so everything is written for
//! clarity and determinism rather than asymptotics: cyclic Jacobi for the
//! Hermitian eigenproblem, Gaussian elimination with partial pivoting for
//! solves, and spectral calculus `f(A) = V f(Λ) V*` on top.

use crate::scalar::{cre, czero, Real, C};
use num_complex::Complex;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![czero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = cre(T::one());
        }
        m
    }

    /// Matrix from nested rows; all rows must have length `rows.len()`.
    pub fn from_rows(rows: &[Vec<C<T>>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "square matrix rows must have length n");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag_re(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = cre(v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> C<T> {
        (0..self.n).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, c: C<T>) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.n, other.n);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, c| acc.max(c.norm()))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.sub(&self.adjoint()).max_abs() <= tol * (T::one() + self.max_abs())
    }

    /// Hermitian part `(A + A*)/2`.
    pub fn hermitize(&self) -> Self {
        self.add(&self.adjoint()).scale(cre(T::of(0.5)))
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps with
    /// complex plane rotations. Returns eigenvalues ascending and a unitary
    /// `V` with `A = V diag(λ) V*` (eigenvectors in columns).
    pub fn eig_hermitian(&self) -> (Vec<T>, Mat<T>) {
        let n = self.n;
        let mut a = self.clone();
        let mut v = Mat::identity(n);
        if n <= 1 {
            let lam = if n == 1 { vec![a[(0, 0)].re] } else { vec![] };
            return (lam, v);
        }
        let scale = a.max_abs().max(T::one());
        let tol = T::epsilon() * scale * T::of(n as f64);
        for _sweep in 0..100 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let g = a[(p, q)];
                    let gabs = g.norm();
                    if gabs <= tol * T::of(1e-3) {
                        continue;
                    }
                    let phase = g / cre(gabs);
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let tau = (aqq - app) / (T::of(2.0) * gabs);
                    let t = if tau == T::zero() {
                        T::one()
                    } else {
                        tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    // U = I with U[p,p]=c, U[p,q]=s·phase, U[q,p]=-s·conj(phase), U[q,q]=c
                    let upq = phase * cre(s);
                    let uqp = -phase.conj() * cre(s);
                    // A ← U* A U: first columns, then rows.
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip * cre(c) + aiq * uqp;
                        a[(i, q)] = aip * upq + aiq * cre(c);
                    }
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = apj * cre(c) + aqj * uqp.conj();
                        a[(q, j)] = apj * upq.conj() + aqj * cre(c);
                    }
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip * cre(c) + viq * uqp;
                        v[(i, q)] = vip * upq + viq * cre(c);
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        let lam: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| lam[i].partial_cmp(&lam[j]).expect("eigenvalue NaN"));
        let sorted: Vec<T> = order.iter().map(|&i| lam[i]).collect();
        let mut vs = Mat::zeros(n);
        for (newj, &oldj) in order.iter().enumerate() {
            for i in 0..n {
                vs[(i, newj)] = v[(i, oldj)];
            }
        }
        (sorted, vs)
    }

    /// Spectral calculus on the Hermitian part: `V f(λ) V*`. The caller must
    /// pass an (approximately) Hermitian matrix.
    pub fn func_hermitian(&self, f: impl Fn(T) -> C<T>) -> Mat<T> {
        let (lam, v) = self.eig_hermitian();
        let n = self.n;
        let mut out = Mat::zeros(n);
        for k in 0..n {
            let fk = f(lam[k]);
            if fk.norm_sqr() == T::zero() {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Largest singular value, via the Hermitian eigenproblem of `A*A`.
    pub fn op_norm(&self) -> T {
        let ata = self.adjoint().mul(self);
        let (lam, _) = ata.eig_hermitian();
        lam.last().map(|&l| l.max(T::zero()).sqrt()).unwrap_or(T::zero())
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eig_hermitian(&self) -> T {
        let (lam, _) = self.eig_hermitian();
        lam.first().copied().unwrap_or(T::zero())
    }

    /// Solve `A x = b` for a stack of right-hand sides (columns of `b`) by
    /// Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &Mat<T>) -> Option<Mat<T>> {
        assert_eq!(self.n, b.n);
        let n = self.n;
        let mut a = self.clone();
        let mut x = b.clone();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[(col, col)].norm();
            for r in (col + 1)..n {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best <= T::epsilon() * T::of(16.0) * (T::one() + a.max_abs()) {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(col * n + j, piv * n + j);
                    x.data.swap(col * n + j, piv * n + j);
                }
            }
            let d = a[(col, col)];
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)] / d;
                if factor.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let acj = a[(col, j)];
                    a[(r, j)] -= factor * acj;
                    let xcj = x[(col, j)];
                    x[(r, j)] -= factor * xcj;
                }
            }
        }
        for i in 0..n {
            let d = a[(i, i)];
            for j in 0..n {
                x[(i, j)] /= d;
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat<T>> {
        self.solve(&Mat::identity(self.n))
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Complex unit `e^{iθ}` as a matrix-free helper.
pub fn cis<T: Real>(theta: T) -> C<T> {
    Complex::new(theta.cos(), theta.sin())
}
