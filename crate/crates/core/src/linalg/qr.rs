//! Householder QR, optionally with column pivoting, for real and complex
//! matrices in either precision.

use super::matrix::{dot, norm2, Matrix};
use crate::precision::{Real, Scalar};

/// Compact Householder factorization `A P = Q R`.
///
/// Reflector `k` is `H_k = I - tau_k v_k v_kᴴ` with `v_k[k] = 1`; its tail is
/// stored below the diagonal of `factors`, and `R` occupies the upper
/// triangle.
#[derive(Clone, Debug)]
pub struct HouseholderQr<S: Scalar> {
    factors: Matrix<S>,
    taus: Vec<S>,
    perm: Vec<usize>,
}

/// Builds the reflector annihilating `x[1..]`; returns `(tau, beta)` and
/// overwrites `x[1..]` with the reflector tail.
pub(super) fn make_reflector<S: Scalar>(x: &mut [S]) -> (S, S::Real) {
    let alpha = x[0];
    let xnorm = norm2(&x[1..]);
    let zero = S::Real::zero();
    if xnorm == zero && alpha.im() == zero {
        return (S::zero(), alpha.re());
    }
    let norm = alpha.modulus().hypot(xnorm);
    let beta = -alpha.re().signum_or_one() * norm;
    let tau = (S::from_real(beta) - alpha).scale(S::Real::one() / beta);
    let inv = S::one() / (alpha - S::from_real(beta));
    for v in &mut x[1..] {
        *v *= inv;
    }
    (tau, beta)
}

/// Applies `I - tau v vᴴ` (with implicit `v[0] = 1`) to `y`.
#[inline]
pub(super) fn apply_reflector<S: Scalar>(v_tail: &[S], tau: S, y: &mut [S]) {
    if tau.is_zero() {
        return;
    }
    let s = y[0] + dot(v_tail, &y[1..]);
    let f = tau * s;
    y[0] -= f;
    for (yi, &vi) in y[1..].iter_mut().zip(v_tail) {
        *yi -= f * vi;
    }
}

impl<S: Scalar> HouseholderQr<S> {
    /// Unpivoted factorization `A = Q R`.
    pub fn new(a: &Matrix<S>) -> Self {
        Self::factor(a, false)
    }

    /// Column-pivoted factorization `A P = Q R` choosing, at every step,
    /// the remaining column of largest norm.
    pub fn with_pivoting(a: &Matrix<S>) -> Self {
        Self::factor(a, true)
    }

    fn factor(a: &Matrix<S>, pivot: bool) -> Self {
        let (m, n) = a.shape();
        let mut f = a.clone();
        let p = m.min(n);
        let mut taus = Vec::with_capacity(p);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..p {
            if pivot {
                let mut best = k;
                let mut best_norm = S::Real::zero();
                for j in k..n {
                    let nj = norm2(&f.col(j)[k..]);
                    if nj > best_norm {
                        best_norm = nj;
                        best = j;
                    }
                }
                if best != k {
                    f.swap_cols(k, best);
                    perm.swap(k, best);
                }
            }
            let (tau, beta) = make_reflector(&mut f.col_mut(k)[k..]);
            f[(k, k)] = S::from_real(beta);
            taus.push(tau);
            if tau.is_zero() {
                continue;
            }
            // Qᴴ is applied to the trailing columns, so use conj(tau).
            let tau_h = tau.conj();
            for j in k + 1..n {
                let (vk, cj) = f.col_pair_mut(k, j);
                apply_reflector(&vk[k + 1..], tau_h, &mut cj[k..]);
            }
        }
        Self { factors: f, taus, perm }
    }

    pub fn rows(&self) -> usize {
        self.factors.rows()
    }

    pub fn cols(&self) -> usize {
        self.factors.cols()
    }

    /// Column permutation: column `j` of `A P` is column `perm[j]` of `A`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Upper-trapezoidal `R` (`min(m, n) × n`).
    pub fn r(&self) -> Matrix<S> {
        let p = self.taus.len();
        Matrix::from_fn(p, self.cols(), |i, j| {
            if i <= j {
                self.factors[(i, j)]
            } else {
                S::zero()
            }
        })
    }

    pub fn r_diag(&self) -> Vec<S> {
        (0..self.taus.len()).map(|k| self.factors[(k, k)]).collect()
    }

    /// `b <- Qᴴ b`.
    pub fn apply_qh(&self, b: &mut [S]) {
        for (k, &tau) in self.taus.iter().enumerate() {
            apply_reflector(&self.factors.col(k)[k + 1..], tau.conj(), &mut b[k..]);
        }
    }

    /// `b <- Q b`.
    pub fn apply_q(&self, b: &mut [S]) {
        for (k, &tau) in self.taus.iter().enumerate().rev() {
            apply_reflector(&self.factors.col(k)[k + 1..], tau, &mut b[k..]);
        }
    }

    /// Thin `Q` with `min(m, n)` orthonormal columns.
    pub fn q_thin(&self) -> Matrix<S> {
        let m = self.rows();
        let p = self.taus.len();
        let mut q = Matrix::zeros(m, p);
        for j in 0..p {
            let col = q.col_mut(j);
            col[j] = S::one();
            self.apply_q(col);
        }
        q
    }

    /// Full square `Q`.
    pub fn q_full(&self) -> Matrix<S> {
        let m = self.rows();
        let mut q = Matrix::identity(m);
        for j in 0..m {
            self.apply_q(q.col_mut(j));
        }
        q
    }
}

/// Result of a least-squares solve.
#[derive(Clone, Debug)]
pub struct LstsqSolution<S: Scalar> {
    pub solution: Vec<S>,
    /// Attained minimum `‖A y − b‖₂`.
    pub residual_norm: S::Real,
    /// Numerical rank used for the basic solution.
    pub rank: usize,
}

/// Minimizes `‖A y − b‖₂` with column-pivoted Householder QR.
///
/// Diagonal entries of `R` at or below `eps^(2/3)·|R₁₁|` are treated as zero
/// and the matching unknowns are set to zero (basic solution). The
/// residual norm is read off the tail of `Qᴴb`, which stays accurate when
/// it is many orders of magnitude below `‖b‖`.
pub fn lstsq<S: Scalar>(a: &Matrix<S>, b: &[S]) -> crate::Result<LstsqSolution<S>> {
    if b.len() != a.rows() {
        return Err(crate::Error::DimensionMismatch {
            op: "lstsq",
            expected: format!("right-hand side of length {}", a.rows()),
            found: format!("length {}", b.len()),
        });
    }
    let qr = HouseholderQr::with_pivoting(a);
    Ok(solve_with_qr(&qr, b))
}

pub(crate) fn solve_with_qr<S: Scalar>(qr: &HouseholderQr<S>, b: &[S]) -> LstsqSolution<S> {
    let n = qr.cols();
    let diag = qr.r_diag();
    let p = diag.len();
    let scale = diag.first().map_or(S::Real::zero(), |d| d.modulus());
    let eps = S::Real::epsilon();
    let tol = scale * rank_tolerance(eps);
    let rank = diag.iter().take_while(|d| d.modulus() > tol).count();

    let mut c = b.to_vec();
    qr.apply_qh(&mut c);

    let mut z = vec![S::zero(); rank];
    for i in (0..rank).rev() {
        let mut s = c[i];
        for j in i + 1..rank {
            s -= qr.factors[(i, j)] * z[j];
        }
        z[i] = s / qr.factors[(i, i)];
    }
    let mut y = vec![S::zero(); n];
    for (i, &zi) in z.iter().enumerate() {
        y[qr.perm[i]] = zi;
    }
    let residual_norm = norm2(&c[rank.min(p)..]);
    LstsqSolution {
        solution: y,
        residual_norm,
        rank,
    }
}

/// `eps^(2/3)` without transcendental functions on the generic type.
fn rank_tolerance<T: Real>(eps: T) -> T {
    T::from_f64(eps.to_f64().powf(2.0 / 3.0))
}
