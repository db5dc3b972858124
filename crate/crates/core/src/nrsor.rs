//! NR-SOR inner iterations as the preconditioner of BA-GMRES, plus the
//! explicit splitting matrices used for eigen-analysis.

use crate::gmres::{ba_gmres, ConvergenceTrace, GmresOptions, OperatorHandle};
use crate::linalg::{axpy, dot, Matrix};
use crate::precision::{Real, Scalar};
use crate::{Error, Result};

/// Relaxation parameter, number of sweeps and the squared column norms of
/// the matrix the configuration was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct NrsorConfig<T> {
    omega: T,
    inner_steps: usize,
    column_norms: Vec<T>,
}

fn check_omega<T: Real>(omega: T) -> Result<()> {
    if !(omega > T::zero() && omega < T::from_f64(2.0)) {
        return Err(Error::InvalidArgument(format!(
            "relaxation parameter must lie in (0, 2), got {}",
            omega.to_f64()
        )));
    }
    Ok(())
}

fn zero_columns<T: Real>(norms: &[T]) -> Result<()> {
    let zero: Vec<String> = norms
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == T::zero())
        .map(|(j, _)| (j + 1).to_string())
        .collect();
    if zero.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidMatrix(format!("zero columns: {}", zero.join(", "))))
    }
}

impl<T: Real> NrsorConfig<T> {
    pub fn new(a: &Matrix<T>, omega: T, inner_steps: usize) -> Result<Self> {
        check_omega(omega)?;
        if inner_steps == 0 {
            return Err(Error::InvalidArgument("inner_steps must be at least 1".into()));
        }
        let column_norms: Vec<T> = (0..a.cols()).map(|j| dot(a.col(j), a.col(j))).collect();
        zero_columns(&column_norms)?;
        Ok(Self {
            omega,
            inner_steps,
            column_norms,
        })
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn inner_steps(&self) -> usize {
        self.inner_steps
    }

    pub fn column_norms(&self) -> &[T] {
        &self.column_norms
    }
}

/// `w = P^(l) Aᵀ u`: `l` SOR sweeps on `AᵀA w = Aᵀu` from `w = 0`, carried
/// out on `A` itself through the residual `r = u − A w`.
pub fn nrsor_apply<T: Real>(a: &Matrix<T>, cfg: &NrsorConfig<T>, u: &[T]) -> Result<Vec<T>> {
    if u.len() != a.rows() || cfg.column_norms.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            op: "nrsor_apply",
            expected: format!("vector of length {} and config for {} columns", a.rows(), a.cols()),
            found: format!("length {} and config for {} columns", u.len(), cfg.column_norms.len()),
        });
    }
    let n = a.cols();
    let mut r = u.to_vec();
    let mut w = vec![T::zero(); n];
    for _ in 0..cfg.inner_steps {
        for i in 0..n {
            let ai = a.col(i);
            let delta = cfg.omega * dot(ai, &r) / cfg.column_norms[i];
            w[i] += delta;
            axpy(-delta, ai, &mut r);
        }
    }
    Ok(w)
}

/// `M = D/ω + L`, `N = (1/ω − 1)D − U` for `AᵀA = L + D + U`, and
/// `H = M⁻¹N`.
#[derive(Clone, Debug)]
pub struct SplittingMatrices<T: Scalar> {
    pub m: Matrix<T>,
    pub n: Matrix<T>,
    pub h: Matrix<T>,
}

pub fn explicit_splitting<T: Real>(a: &Matrix<T>, omega: T) -> Result<SplittingMatrices<T>> {
    check_omega(omega)?;
    let g = a.gram();
    let size = g.rows();
    zero_columns(&(0..size).map(|i| g[(i, i)]).collect::<Vec<_>>())?;
    let inv_omega = T::one() / omega;
    let m = Matrix::from_fn(size, size, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => g[(i, j)],
        std::cmp::Ordering::Equal => g[(i, i)] * inv_omega,
        std::cmp::Ordering::Less => T::zero(),
    });
    let n = Matrix::from_fn(size, size, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => T::zero(),
        std::cmp::Ordering::Equal => (inv_omega - T::one()) * g[(i, i)],
        std::cmp::Ordering::Less => -g[(i, j)],
    });
    let mut h = n.clone();
    for j in 0..size {
        forward_substitute(&m, h.col_mut(j));
    }
    Ok(SplittingMatrices { m, n, h })
}

/// `x <- L⁻¹ x` for lower-triangular `L`.
fn forward_substitute<T: Real>(l: &Matrix<T>, x: &mut [T]) {
    let n = l.rows();
    for j in 0..n {
        x[j] /= l[(j, j)];
        let xj = x[j];
        if xj == T::zero() {
            continue;
        }
        let c = l.col(j);
        for i in j + 1..n {
            x[i] -= c[i] * xj;
        }
    }
}

fn matrix_power<T: Real>(h: &Matrix<T>, mut l: usize) -> Matrix<T> {
    let mut result = Matrix::identity(h.rows());
    let mut base = h.clone();
    let mut first = true;
    while l > 0 {
        if l & 1 == 1 {
            result = if first {
                base.clone()
            } else {
                result.matmul(&base).expect("square")
            };
            first = false;
        }
        l >>= 1;
        if l > 0 {
            base = base.matmul(&base).expect("square");
        }
    }
    result
}

/// `I − H^l`, the matrix `P^(l) AᵀA` the outer iteration effectively sees.
pub fn preconditioned_matrix<T: Real>(a: &Matrix<T>, omega: T, l: usize) -> Result<Matrix<T>> {
    let s = explicit_splitting(a, omega)?;
    Ok(Matrix::identity(s.h.rows()).sub(&matrix_power(&s.h, l)))
}

/// `H^l` for an already formed splitting.
pub fn splitting_power<T: Real>(s: &SplittingMatrices<T>, l: usize) -> Matrix<T> {
    matrix_power(&s.h, l)
}

/// Dense `P^(l) Aᵀ = (Σ_{i<l} H^i) M⁻¹ Aᵀ`, for checking the sweeps.
pub fn explicit_preconditioner<T: Real>(a: &Matrix<T>, omega: T, l: usize) -> Result<Matrix<T>> {
    let s = explicit_splitting(a, omega)?;
    let mut minv_at = a.transpose();
    for j in 0..minv_at.cols() {
        forward_substitute(&s.m, minv_at.col_mut(j));
    }
    let mut acc = minv_at.clone();
    let mut term = minv_at;
    for _ in 1..l {
        term = s.h.matmul(&term).expect("conforming");
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// BA-GMRES with `l` NR-SOR sweeps as the preconditioner.
pub fn nrsor_ba_gmres<T: Real>(
    a: &Matrix<T>,
    cfg: &NrsorConfig<T>,
    b: &[T],
    x0: Option<&[T]>,
    opts: &GmresOptions,
) -> Result<ConvergenceTrace<T>> {
    let precond = OperatorHandle::new(a.cols(), a.rows(), |u: &[T]| {
        nrsor_apply(a, cfg, u).expect("shape checked by ba_gmres")
    });
    if cfg.column_norms.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            op: "nrsor_ba_gmres",
            expected: format!("config for {} columns", a.cols()),
            found: format!("config for {} columns", cfg.column_norms.len()),
        });
    }
    ba_gmres(a, &precond, b, x0, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_matrix, random_orthogonal};
    use crate::linalg::norm2;

    #[test]
    fn orthonormal_columns_one_sweep_is_transpose() {
        let q = random_orthogonal::<f64>(5, 3).columns(0..3);
        let cfg = NrsorConfig::new(&q, 1.0, 1).unwrap();
        let u = [1.0, -1.0, 0.5, 2.0, 0.25];
        let w = nrsor_apply(&q, &cfg, &u).unwrap();
        let qtu = q.transpose_matvec(&u).unwrap();
        for (x, y) in w.iter().zip(&qtu) {
            assert!((x - y).abs() < 1e-14);
        }
        let s = explicit_splitting(&q, 1.0).unwrap();
        assert!(s.h.max_abs() < 1e-14);
    }

    #[test]
    fn sweeps_match_explicit_formula() {
        let a = random_matrix::<f64>(8, 4, 6);
        let u: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
        for l in 1..=4 {
            let cfg = NrsorConfig::new(&a, 1.3, l).unwrap();
            let w = nrsor_apply(&a, &cfg, &u).unwrap();
            let p = explicit_preconditioner(&a, 1.3, l).unwrap();
            let w2 = p.matvec(&u).unwrap();
            let diff: Vec<f64> = w.iter().zip(&w2).map(|(x, y)| x - y).collect();
            assert!(norm2(&diff) <= 1e-12 * norm2(&w2), "l = {l}");
        }
    }

    #[test]
    fn zero_input_gives_zero() {
        let a = random_matrix::<f64>(4, 2, 1);
        let cfg = NrsorConfig::new(&a, 1.0, 3).unwrap();
        assert_eq!(nrsor_apply(&a, &cfg, &[0.0; 4]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn splitting_reassembles_gram() {
        let a = random_matrix::<f64>(6, 4, 2);
        let s = explicit_splitting(&a, 0.8).unwrap();
        let diff = s.m.sub(&s.n).sub(&a.gram()).max_abs();
        assert!(diff <= 4.0 * f64::EPSILON * a.gram().max_abs());
    }

    #[test]
    fn zero_columns_are_listed() {
        let a = Matrix::from_rows(&[&[1.0, 0.0, 0.0], &[2.0, 0.0, 1.0]]);
        match NrsorConfig::new(&a, 1.0, 1) {
            Err(Error::InvalidMatrix(msg)) => assert!(msg.contains('2')),
            other => panic!("{other:?}"),
        }
        assert!(NrsorConfig::new(&random_matrix::<f64>(3, 2, 0), 2.0, 1).is_err());
    }

    #[test]
    fn matches_ba_gmres_with_explicit_preconditioner() {
        let a = random_matrix::<f64>(9, 5, 13);
        let b: Vec<f64> = (0..9).map(|i| 1.0 + i as f64).collect();
        let cfg = NrsorConfig::new(&a, 1.1, 2).unwrap();
        let opts = GmresOptions { rtol: 1e-12, ..Default::default() };
        let t1 = nrsor_ba_gmres(&a, &cfg, &b, None, &opts).unwrap();
        let p = explicit_preconditioner(&a, 1.1, 2).unwrap();
        let t2 = ba_gmres(&a, &OperatorHandle::from_matrix(&p), &b, None, &opts).unwrap();
        assert_eq!(t1.records.len(), t2.records.len());
        for (r1, r2) in t1.records.iter().zip(&t2.records) {
            let scale = r2.residual_norm.max(1e-300);
            assert!((r1.residual_norm - r2.residual_norm).abs() <= 1e-10 * scale);
        }
    }
}
