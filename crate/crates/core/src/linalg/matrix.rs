use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::precision::{Complex, Real, Scalar};

/// Dense column-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

pub type DenseMatrix<S> = Matrix<S>;
pub type DenseVector<S> = Vec<S>;

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "from_col_major",
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Row-major nested literal, handy for small fixed matrices.
    pub fn from_rows(rows: &[&[S]]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n), "ragged rows");
        Self::from_fn(m, n, |i, j| rows[i][j])
    }

    pub fn from_columns(cols: &[Vec<S>]) -> Self {
        let n = cols.len();
        let m = cols.first().map_or(0, |c| c.len());
        Self::from_fn(m, n, |i, j| cols[j][i])
    }

    pub fn diagonal(diag: &[S]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[S] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [S] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Mutable access to two distinct columns at once.
    pub fn col_pair_mut(&mut self, p: usize, q: usize) -> (&mut [S], &mut [S]) {
        assert!(p != q);
        let m = self.rows;
        if p < q {
            let (a, b) = self.data.split_at_mut(q * m);
            (&mut a[p * m..(p + 1) * m], &mut b[..m])
        } else {
            let (a, b) = self.data.split_at_mut(p * m);
            (&mut b[..m], &mut a[q * m..(q + 1) * m])
        }
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        (0..self.cols).map(|j| self[(i, j)]).collect()
    }

    pub fn swap_cols(&mut self, p: usize, q: usize) {
        if p != q {
            let (a, b) = self.col_pair_mut(p, q);
            a.swap_with_slice(b);
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn columns(&self, range: std::ops::Range<usize>) -> Self {
        Self::from_fn(self.rows, range.len(), |i, j| self[(i, range.start + j)])
    }

    fn check_vec(&self, op: &'static str, expected: usize, found: usize) -> Result<()> {
        if expected != found {
            return Err(Error::DimensionMismatch {
                op,
                expected: format!("vector of length {expected}"),
                found: format!("length {found}"),
            });
        }
        Ok(())
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[S]) -> Result<Vec<S>> {
        self.check_vec("matvec", self.cols, x.len())?;
        let mut y = vec![S::zero(); self.rows];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` into a caller-owned buffer; dimensions must already agree.
    pub fn matvec_into(&self, x: &[S], y: &mut [S]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        y.iter_mut().for_each(|v| *v = S::zero());
        for (j, &xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for (yi, &aij) in y.iter_mut().zip(self.col(j)) {
                *yi += aij * xj;
            }
        }
    }

    /// `y = Aᴴ x` (the transpose for real matrices).
    pub fn transpose_matvec(&self, x: &[S]) -> Result<Vec<S>> {
        self.check_vec("transpose_matvec", self.rows, x.len())?;
        let mut y = vec![S::zero(); self.cols];
        self.transpose_matvec_into(x, &mut y);
        Ok(y)
    }

    pub fn transpose_matvec_into(&self, x: &[S], y: &mut [S]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = dot(self.col(j), x);
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", other.rows),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let (src, dst) = (other.col(j), &mut out.data[j * self.rows..(j + 1) * self.rows]);
            for (k, &bkj) in src.iter().enumerate() {
                if bkj.is_zero() {
                    continue;
                }
                for (d, &aik) in dst.iter_mut().zip(self.col(k)) {
                    *d += aik * bkj;
                }
            }
        }
        Ok(out)
    }

    /// `Aᴴ A`, formed densely.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let v = dot(self.col(i), self.col(j));
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        g
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape());
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape());
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn scaled(&self, s: S) -> Self {
        self.map(|x| x * s)
    }

    pub fn norm_fro(&self) -> S::Real {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> S::Real {
        self.data
            .iter()
            .fold(S::Real::zero(), |m, x| Real::max(m, x.modulus()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl<T: Real> Matrix<T> {
    /// Real matrix viewed as complex.
    pub fn to_complex(&self) -> Matrix<Complex<T>> {
        self.map(|x| Complex::new(x, T::zero()))
    }

    /// Converts entries to another real precision through binary64
    /// (exact when widening from binary64).
    pub fn cast<U: Real>(&self) -> Matrix<U> {
        self.map(|x| <U as Scalar>::from_f64(x.to_f64()))
    }
}

impl<T: Real> Matrix<Complex<T>> {
    pub fn cast_complex<U: Real>(&self) -> Matrix<Complex<U>> {
        self.map(|z| z.cast::<U>())
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

/// Conjugate-linear inner product `xᴴ y`.
#[inline]
pub fn dot<S: Scalar>(x: &[S], y: &[S]) -> S {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = S::zero();
    for (&a, &b) in x.iter().zip(y) {
        acc += a.conj() * b;
    }
    acc
}

/// Euclidean norm with scaling, safe against overflow.
pub fn norm2<S: Scalar>(x: &[S]) -> S::Real {
    let big = x
        .iter()
        .fold(S::Real::zero(), |m, v| Real::max(m, v.modulus()));
    if big == S::Real::zero() || !big.is_finite() {
        return big;
    }
    let inv = S::Real::one() / big;
    let sum: S::Real = x.iter().map(|v| v.scale(inv).modulus_sqr()).sum();
    big * sum.sqrt()
}

/// `y += a x`.
#[inline]
pub fn axpy<S: Scalar>(a: S, x: &[S], y: &mut [S]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn scale_in_place<S: Scalar>(x: &mut [S], a: S) {
    x.iter_mut().for_each(|v| *v *= a);
}

pub fn sub_vec<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

pub fn cast_vec<T: Real, U: Real>(x: &[T]) -> Vec<U> {
    x.iter().map(|v| <U as Scalar>::from_f64(v.to_f64())).collect()
}
