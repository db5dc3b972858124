//! One-sided (Hestenes) Jacobi SVD and derived 2-norm quantities.

use super::matrix::{axpy, dot, norm2, scale_in_place, Matrix};
use crate::precision::{Real, Scalar};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U Σ Vᴴ`.
#[derive(Clone, Debug)]
pub struct SvdResult<S: Scalar> {
    /// Descending, nonnegative.
    pub singular_values: Vec<S::Real>,
    /// `m × p` with orthonormal columns, `p = min(m, n)`.
    pub u: Matrix<S>,
    /// `n × p` with orthonormal columns.
    pub v: Matrix<S>,
}

impl<S: Scalar> SvdResult<S> {
    /// Largest singular value.
    pub fn sigma_max(&self) -> S::Real {
        self.singular_values.first().copied().unwrap_or(S::Real::zero())
    }

    pub fn sigma_min(&self) -> S::Real {
        self.singular_values.last().copied().unwrap_or(S::Real::zero())
    }

    /// Number of singular values above `tol`.
    pub fn rank(&self, tol: S::Real) -> usize {
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }

    pub fn reconstruct(&self) -> Matrix<S> {
        let mut us = self.u.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            scale_in_place(us.col_mut(j), S::from_real(s));
        }
        us.matmul(&self.v.adjoint()).expect("conforming factors")
    }
}

/// One-sided Jacobi SVD. Sweeps continue until every column pair satisfies
/// `|w_pᴴ w_q| <= n·eps·‖w_p‖‖w_q‖`.
pub fn jacobi_svd<S: Scalar>(a: &Matrix<S>) -> SvdResult<S> {
    if a.rows() < a.cols() {
        let t = jacobi_svd(&a.adjoint());
        return SvdResult {
            singular_values: t.singular_values,
            u: t.v,
            v: t.u,
        };
    }
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = Matrix::<S>::identity(n);
    let eps = S::Real::epsilon();
    let tol = eps * S::Real::from_usize(n.max(1));
    let floor = {
        let f = a.norm_fro() * eps;
        f * f
    };

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(w.col(p), w.col(p)).re();
                let beta = dot(w.col(q), w.col(q)).re();
                if alpha <= floor || beta <= floor {
                    continue;
                }
                let gamma = dot(w.col(p), w.col(q));
                let g = gamma.modulus();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.scale(S::Real::one() / g).conj();
                let two = S::Real::from_f64(2.0);
                let zeta = (beta - alpha) / (two * g);
                let t = zeta.signum_or_one() / (zeta.abs() + (S::Real::one() + zeta * zeta).sqrt());
                let c = S::Real::one() / (S::Real::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(S::Real, usize)> = (0..n).map(|j| (norm2(w.col(j)), j)).collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal).then(x.1.cmp(&y.1)));

    let sigma_tiny = a.norm_fro() * eps * S::Real::from_usize(m.max(n));
    let mut u = Matrix::<S>::zeros(m, n);
    let mut vs = Matrix::<S>::zeros(n, n);
    let mut sv = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (k, &(s, j)) in order.iter().enumerate() {
        vs.col_mut(k).copy_from_slice(v.col(j));
        if s > sigma_tiny {
            let inv = S::from_real(S::Real::one() / s);
            for (dst, &src) in u.col_mut(k).iter_mut().zip(w.col(j)) {
                *dst = src * inv;
            }
            sv.push(s);
        } else {
            sv.push(s);
            deficient.push(k);
        }
    }
    complete_orthonormal(&mut u, &deficient);
    SvdResult {
        singular_values: sv,
        u,
        v: vs,
    }
}

fn rotate<S: Scalar>(x: &mut Matrix<S>, p: usize, q: usize, c: S::Real, s: S::Real, phase: S) {
    let (xp, xq) = x.col_pair_mut(p, q);
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let bq = *b * phase;
        let ap = *a;
        *a = ap.scale(c) - bq.scale(s);
        *b = ap.scale(s) + bq.scale(c);
    }
}

/// Fills the listed columns with unit vectors orthogonal to every other
/// column: Gram–Schmidt on the standard basis vector least covered by the
/// columns already present.
fn complete_orthonormal<S: Scalar>(u: &mut Matrix<S>, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let m = u.rows();
    let mut filled: Vec<usize> = (0..u.cols()).filter(|j| !missing.contains(j)).collect();
    // covered[i] = Σ_j |u_ij|² over filled columns.
    let mut covered = vec![S::Real::zero(); m];
    for &j in &filled {
        for (c, x) in covered.iter_mut().zip(u.col(j)) {
            *c += x.modulus_sqr();
        }
    }
    for &k in missing {
        let best = (0..m)
            .min_by(|&a, &b| covered[a].partial_cmp(&covered[b]).unwrap_or(std::cmp::Ordering::Equal))
            .expect("nonempty");
        let mut e = vec![S::zero(); m];
        e[best] = S::one();
        for _ in 0..2 {
            for &j in &filled {
                let h = dot(u.col(j), &e);
                axpy(-h, u.col(j), &mut e);
            }
        }
        let nrm = norm2(&e);
        scale_in_place(&mut e, S::from_real(S::Real::one() / nrm));
        for (c, x) in covered.iter_mut().zip(&e) {
            *c += x.modulus_sqr();
        }
        u.col_mut(k).copy_from_slice(&e);
        filled.push(k);
    }
}

/// `σ_max(A)` by power iteration on `AᴴA`, to relative change `1e-12`.
/// Falls back to the full SVD when the iteration stagnates.
pub fn spectral_norm<S: Scalar>(a: &Matrix<S>) -> S::Real {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return S::Real::zero();
    }
    let rtol = S::Real::from_f64(1e-12);
    // Deterministic start with no special structure.
    let mut x: Vec<S> = (0..n)
        .map(|i| S::from_f64(1.0 + ((i * 7919) % 104_729) as f64 / 104_729.0))
        .collect();
    let nx = norm2(&x);
    scale_in_place(&mut x, S::from_real(S::Real::one() / nx));
    let mut est = S::Real::zero();
    let mut ax = vec![S::zero(); a.rows()];
    for _ in 0..2000 {
        a.matvec_into(&x, &mut ax);
        let mut y = vec![S::zero(); n];
        a.transpose_matvec_into(&ax, &mut y);
        let ny = norm2(&y);
        if ny == S::Real::zero() {
            return norm2(&ax);
        }
        let new_est = ny.sqrt();
        scale_in_place(&mut y, S::from_real(S::Real::one() / ny));
        x = y;
        if (new_est - est).abs() <= rtol * new_est {
            return new_est;
        }
        est = new_est;
    }
    jacobi_svd(a).sigma_max()
}

/// 2-norm condition number `σ_max / σ_min`; infinite for rank-deficient input.
pub fn condition_number_2<S: Scalar>(a: &Matrix<S>) -> S::Real {
    let svd = jacobi_svd(a);
    let smin = svd.sigma_min();
    if smin == S::Real::zero() {
        return S::Real::from_f64(f64::INFINITY);
    }
    svd.sigma_max() / smin
}
