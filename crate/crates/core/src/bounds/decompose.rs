//! Expansion of an initial residual in the eigenvectors of the operator.

use crate::linalg::eig::fix_phase;
use crate::linalg::{condition_number_2, eig_nonsymmetric, jacobi_svd, lstsq, norm2, solve_vector, Matrix};
use crate::precision::{Complex, Real, Scalar};
use crate::{Error, Result};

/// Eigenvalues `λ_i`, unit eigenvectors `v_i` and weights `c_i` with
/// `r₀ = Σ c_i v_i`, restricted to nonzero eigenvalues and nonzero weights.
#[derive(Clone, Debug)]
pub struct EigenData<T: Real> {
    pub lambdas: Vec<Complex<T>>,
    /// `n × d`, unit columns.
    pub vectors: Matrix<Complex<T>>,
    pub weights: Vec<Complex<T>>,
    /// `‖r₀ − V c‖₂` for the retained pairs.
    pub unexplained_residual: T,
    pub r0_norm: T,
}

impl<T: Real> EigenData<T> {
    /// Number of retained eigenpairs.
    pub fn d(&self) -> usize {
        self.lambdas.len()
    }

    /// `κ₂(V_d)`.
    pub fn condition_number(&self) -> T {
        condition_number_2(&self.vectors)
    }

    /// `[c₁v₁ … c_d v_d]`.
    pub fn weighted_vectors(&self) -> Matrix<Complex<T>> {
        let mut w = self.vectors.clone();
        for (j, &c) in self.weights.iter().enumerate() {
            for x in w.col_mut(j) {
                *x *= c;
            }
        }
        w
    }

    /// Largest `|v_iᴴ v_j|` over `i ≠ j`.
    pub fn max_offdiagonal_inner_product(&self) -> T {
        let d = self.d();
        let mut worst = T::zero();
        for i in 0..d {
            for j in i + 1..d {
                let ip = crate::linalg::dot(self.vectors.col(i), self.vectors.col(j));
                worst = worst.max(ip.modulus());
            }
        }
        worst
    }
}

/// Tolerances for [`decompose_rhs`].
#[derive(Clone, Debug, PartialEq)]
pub struct DecomposeOptions {
    /// Eigenvalues with `|λ| ≤ zero_tol·max|λ|` are discarded.
    pub zero_tol: f64,
    /// Eigenvalues at most this far apart are merged; 0 merges only exact
    /// duplicates.
    pub merge_tol: f64,
    /// Weights with `|c_i| ≤ c_tol·‖c‖₂` are dropped. `None` uses
    /// `100·eps` of the working precision.
    pub c_tol: Option<f64>,
    /// Largest accepted `‖r₀ − Vc‖ / ‖r₀‖`.
    pub range_tol: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            zero_tol: 1e-12,
            merge_tol: 0.0,
            c_tol: None,
            range_tol: 1e-6,
        }
    }
}

/// Eigen-decomposes `op_matrix` and expands `r0` in its eigenvectors.
pub fn decompose_rhs<T: Real>(op_matrix: &Matrix<T>, r0: &[T]) -> Result<EigenData<T>> {
    decompose_rhs_with(op_matrix, r0, &DecomposeOptions::default())
}

pub fn decompose_rhs_with<T: Real>(
    op_matrix: &Matrix<T>,
    r0: &[T],
    opts: &DecomposeOptions,
) -> Result<EigenData<T>> {
    let n = op_matrix.rows();
    if r0.len() != n {
        return Err(Error::DimensionMismatch {
            op: "decompose_rhs",
            expected: format!("vector of length {n}"),
            found: format!("length {}", r0.len()),
        });
    }
    let eig = eig_nonsymmetric(op_matrix)?;
    let max_mod = eig
        .eigenvalues
        .iter()
        .fold(T::zero(), |m, z| m.max(z.modulus()));
    let zero_tol = T::from_f64(opts.zero_tol) * max_mod;
    let keep: Vec<usize> = (0..n)
        .filter(|&i| eig.eigenvalues[i].modulus() > zero_tol)
        .collect();

    let r0c: Vec<Complex<T>> = r0.iter().map(|&x| Complex::from_real(x)).collect();
    let r0_norm = norm2(r0);
    if keep.is_empty() {
        return Err(Error::RhsNotInRange {
            residual: r0_norm.to_f64(),
            norm: r0_norm.to_f64(),
        });
    }
    let v_all = Matrix::from_fn(n, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])]);
    // A full eigenbasis is solved exactly, however ill-conditioned; the
    // rank-revealing least-squares path is for the rectangular case.
    let coeffs = match v_all.is_square() {
        true => solve_vector(&v_all, &r0c).or_else(|_| lstsq(&v_all, &r0c).map(|s| s.solution))?,
        false => lstsq(&v_all, &r0c)?.solution,
    };
    let explained = v_all.matvec(&coeffs)?;
    let diff: Vec<Complex<T>> = r0c.iter().zip(&explained).map(|(&a, &b)| a - b).collect();
    let unexplained = norm2(&diff);
    if unexplained > T::from_f64(opts.range_tol) * r0_norm {
        return Err(Error::RhsNotInRange {
            residual: unexplained.to_f64(),
            norm: r0_norm.to_f64(),
        });
    }

    // Merge groups of (nearly) equal eigenvalues into one pair each.
    let merge_tol = T::from_f64(opts.merge_tol);
    let mut group_of: Vec<Option<usize>> = vec![None; keep.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for a in 0..keep.len() {
        if group_of[a].is_some() {
            continue;
        }
        let g = groups.len();
        group_of[a] = Some(g);
        let mut members = vec![a];
        let mut idx = 0;
        while idx < members.len() {
            let la = eig.eigenvalues[keep[members[idx]]];
            for b in 0..keep.len() {
                if group_of[b].is_none() && (eig.eigenvalues[keep[b]] - la).modulus() <= merge_tol {
                    group_of[b] = Some(g);
                    members.push(b);
                }
            }
            idx += 1;
        }
        groups.push(members);
    }

    let mut lambdas = Vec::new();
    let mut cols: Vec<Vec<Complex<T>>> = Vec::new();
    let mut weights = Vec::new();
    for members in &groups {
        let mut u = vec![Complex::<T>::zero(); n];
        let mut sum = Complex::<T>::zero();
        for &m in members {
            let c = coeffs[m];
            for (ui, &vi) in u.iter_mut().zip(v_all.col(m)) {
                *ui += c * vi;
            }
            sum += eig.eigenvalues[keep[m]];
        }
        let lam = sum.scale(T::one() / T::from_usize(members.len()));
        let nu = norm2(&u);
        if nu == T::zero() {
            continue;
        }
        let v: Vec<Complex<T>> = if members.len() == 1 {
            v_all.col(members[0]).to_vec()
        } else {
            let mut v: Vec<Complex<T>> = u.iter().map(|x| x.scale(T::one() / nu)).collect();
            fix_phase(&mut v);
            v
        };
        let c = if members.len() == 1 {
            coeffs[members[0]]
        } else {
            crate::linalg::dot(&v, &u)
        };
        lambdas.push(lam);
        cols.push(v);
        weights.push(c);
    }

    let c_norm = norm2(&weights);
    let c_tol = opts
        .c_tol
        .map(T::from_f64)
        .unwrap_or_else(|| T::from_f64(100.0) * T::epsilon())
        * c_norm;
    let retained: Vec<usize> = (0..weights.len())
        .filter(|&i| weights[i].modulus() > c_tol)
        .collect();
    let lambdas: Vec<_> = retained.iter().map(|&i| lambdas[i]).collect();
    let weights: Vec<_> = retained.iter().map(|&i| weights[i]).collect();
    let vectors = Matrix::from_columns(&retained.iter().map(|&i| cols[i].clone()).collect::<Vec<_>>());

    let explained = vectors.matvec(&weights)?;
    let diff: Vec<Complex<T>> = r0c.iter().zip(&explained).map(|(&a, &b)| a - b).collect();
    Ok(EigenData {
        lambdas,
        vectors,
        weights,
        unexplained_residual: norm2(&diff),
        r0_norm,
    })
}

/// `‖V_d diag(c)‖₂`.
pub fn weighted_norm<T: Real>(e: &EigenData<T>) -> T {
    if e.d() == 0 {
        return T::zero();
    }
    jacobi_svd(&e.weighted_vectors()).sigma_max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_matrix, random_orthogonal};
    use crate::linalg::Lu;

    #[test]
    fn identity_merges_to_one_pair() {
        let e = decompose_rhs(&Matrix::<f64>::identity(3), &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(e.d(), 1);
        assert!((e.lambdas[0].re - 1.0).abs() < 1e-15);
        assert!((e.weights[0].re - 1.0).abs() < 1e-14 && e.weights[0].im.abs() < 1e-14);
    }

    #[test]
    fn recovers_constructed_weights() {
        let w = random_matrix::<f64>(5, 5, 3);
        let winv = Lu::new(&w).unwrap().inverse().unwrap();
        let d = [4.0, 3.0, 2.0, 1.0, 0.5];
        let a = w.matmul(&Matrix::diagonal(&d)).unwrap().matmul(&winv).unwrap();
        let c_true = [1.0, -2.0, 0.5, 3.0, 1.5];
        let mut r0 = vec![0.0; 5];
        for j in 0..5 {
            let col = w.col(j);
            let nrm = norm2(col);
            for i in 0..5 {
                r0[i] += c_true[j] * col[i] / nrm;
            }
        }
        let e = decompose_rhs(&a, &r0).unwrap();
        assert_eq!(e.d(), 5);
        for (j, lam) in e.lambdas.iter().enumerate() {
            // Phase convention: first component positive.
            let sign = if w[(0, j)] >= 0.0 { 1.0 } else { -1.0 };
            assert!((lam.re - d[j]).abs() < 1e-10);
            assert!((e.weights[j].re - sign * c_true[j]).abs() < 1e-8, "{j}");
        }
    }

    #[test]
    fn orthonormal_weighted_norm_is_max_weight() {
        let q = random_orthogonal::<f64>(4, 9);
        let a = q
            .matmul(&Matrix::diagonal(&[1.0, 2.0, 3.0, 4.0]))
            .unwrap()
            .matmul(&q.transpose())
            .unwrap();
        let r0 = q.matvec(&[0.5, -2.0, 1.0, 0.25]).unwrap();
        let e = decompose_rhs(&a, &r0).unwrap();
        assert!((weighted_norm(&e) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rhs_outside_range_is_rejected() {
        let a = Matrix::diagonal(&[1.0, 0.0]);
        assert!(matches!(
            decompose_rhs(&a, &[1.0, 1.0]),
            Err(Error::RhsNotInRange { .. })
        ));
        let e = decompose_rhs(&a, &[1.0, 0.0]).unwrap();
        assert_eq!(e.d(), 1);
    }
}
