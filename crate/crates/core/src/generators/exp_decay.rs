//! Nonsymmetric matrix with exponentially clustering singular values.

use super::{param, unit, ProblemInstance, ProblemMetadata};
use crate::linalg::random::{rng_from_seed, standard_normals};
use crate::linalg::Matrix;
use crate::precision::Real;
use crate::{Error, Result};

/// Symmetric orthogonal sine matrix `q_jk = √(2/(n+1)) sin(jkπ/(n+1))`.
///
/// Entries are evaluated in binary64 and widened, so in double-double the
/// matrix is orthogonal only to about `1e-16`.
pub fn sine_orthogonal<T: Real>(n: usize) -> Matrix<T> {
    let h = (n + 1) as f64;
    let c = (2.0 / h).sqrt();
    Matrix::from_fn(n, n, |j, k| {
        let jk = ((j + 1) * (k + 1)) % (2 * (n + 1));
        T::from_f64(c * (jk as f64 * std::f64::consts::PI / h).sin())
    })
}

/// `A = diag(1 − e^{−p/4}) Q` with `Q` the sine matrix, and a seeded random
/// unit right-hand side.
pub fn exp_decay_matrix<T: Real>(n: usize, seed: u64) -> Result<ProblemInstance<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("matrix order must be at least 2, got {n}")));
    }
    let d: Vec<f64> = (1..=n).map(|p| 1.0 - (-(p as f64) / 4.0).exp()).collect();
    let q = sine_orthogonal::<T>(n);
    let a = Matrix::from_fn(n, n, |i, j| T::from_f64(d[i]) * q[(i, j)]);
    let mut rng = rng_from_seed(seed);
    let b = unit(standard_normals(n, &mut rng).into_iter().map(T::from_f64).collect());
    let mut sv = d.clone();
    sv.sort_by(|x, y| y.total_cmp(x));
    let metadata = ProblemMetadata {
        name: "exp-decay".into(),
        seed: Some(seed),
        parameters: vec![param("n", n)],
        singular_values: Some(sv),
        eigenvalues: None,
        consistent: true,
    };
    ProblemInstance::new(a, b, metadata)
}
