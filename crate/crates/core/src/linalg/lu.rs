//! Partial-pivot LU for square systems.

use super::matrix::Matrix;
use crate::precision::Scalar;
use crate::{Error, Result};

/// `PA = LU` with row pivoting on the largest modulus.
#[derive(Clone, Debug)]
pub struct Lu<S: Scalar> {
    lu: Matrix<S>,
    piv: Vec<usize>,
}

impl<S: Scalar> Lu<S> {
    /// Fails with [`Error::SingularMatrix`] on an exactly zero pivot.
    pub fn new(a: &Matrix<S>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                op: "lu",
                expected: "square matrix".into(),
                found: format!("{}x{}", a.rows(), a.cols()),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = S::Real::zero();
            for i in k..n {
                let v = lu[(i, k)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == S::Real::zero() {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if p != k {
                piv.swap(p, k);
                for j in 0..n {
                    let c = lu.col_mut(j);
                    c.swap(p, k);
                }
            }
            let d = lu[(k, k)];
            for x in &mut lu.col_mut(k)[k + 1..] {
                *x /= d;
            }
            for j in k + 1..n {
                let (lk, cj) = lu.col_pair_mut(k, j);
                let ukj = cj[k];
                if ukj.is_zero() {
                    continue;
                }
                for (x, &l) in cj[k + 1..].iter_mut().zip(&lk[k + 1..]) {
                    *x -= l * ukj;
                }
            }
        }
        Ok(Self { lu, piv })
    }

    pub fn solve(&self, b: &[S]) -> Result<Vec<S>> {
        let n = self.lu.rows();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                op: "lu solve",
                expected: format!("length {n}"),
                found: format!("length {}", b.len()),
            });
        }
        let mut x: Vec<S> = self.piv.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            if xj.is_zero() {
                continue;
            }
            let c = self.lu.col(j);
            for i in j + 1..n {
                x[i] -= c[i] * xj;
            }
        }
        for j in (0..n).rev() {
            let c = self.lu.col(j);
            x[j] /= c[j];
            let xj = x[j];
            for i in 0..j {
                x[i] -= c[i] * xj;
            }
        }
        Ok(x)
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix<S>) -> Result<Matrix<S>> {
        let cols = (0..b.cols())
            .map(|j| self.solve(b.col(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(&cols))
    }

    pub fn inverse(&self) -> Result<Matrix<S>> {
        self.solve_matrix(&Matrix::identity(self.lu.rows()))
    }
}

/// Solves `A X = B` for square `A`.
pub fn solve_linear<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Result<Matrix<S>> {
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch {
            op: "solve_linear",
            expected: format!("{} rows", a.rows()),
            found: format!("{} rows", b.rows()),
        });
    }
    Lu::new(a)?.solve_matrix(b)
}

/// Solves the square system `A x = b`.
pub fn solve_vector<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Result<Vec<S>> {
    Lu::new(a)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_matrix;
    use crate::precision::DoubleDouble;

    #[test]
    fn solves_random_system() {
        let a = random_matrix::<f64>(6, 6, 1);
        let x: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
        let b = a.matvec(&x).unwrap();
        let y = solve_vector(&a, &b).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn extended_inverse() {
        let a = random_matrix::<DoubleDouble>(5, 5, 2);
        let inv = Lu::new(&a).unwrap().inverse().unwrap();
        let err = a.matmul(&inv).unwrap().sub(&Matrix::identity(5)).max_abs();
        assert!(err.to_f64() < 1e-28);
    }

    #[test]
    fn singular_is_reported() {
        let z = Matrix::<f64>::zeros(2, 2);
        assert!(matches!(Lu::new(&z), Err(Error::SingularMatrix { pivot: 0 })));
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(Lu::new(&a), Err(Error::SingularMatrix { pivot: 1 })));
    }

    #[test]
    fn identity_returns_rhs() {
        let b = random_matrix::<f64>(3, 2, 5);
        let x = solve_linear(&Matrix::identity(3), &b).unwrap();
        assert_eq!(x.as_slice(), b.as_slice());
    }

    fn det3(m: &Matrix<f64>) -> f64 {
        m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
    }

    #[test]
    fn matches_cramer_oracle() {
        let a = random_matrix::<f64>(3, 3, 12);
        let b = [0.5, -1.0, 2.0];
        let x = solve_vector(&a, &b).unwrap();
        let d = det3(&a);
        for k in 0..3 {
            let mut ak = a.clone();
            ak.col_mut(k).copy_from_slice(&b);
            assert!((x[k] - det3(&ak) / d).abs() < 1e-12);
        }
    }
}
