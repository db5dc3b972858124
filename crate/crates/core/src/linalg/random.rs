//! Seeded random test matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::matrix::Matrix;
use super::qr::HouseholderQr;
use crate::precision::{Real, Scalar};

/// Deterministic generator for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// `n` independent standard normal samples.
pub fn standard_normals(n: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// `m × n` matrix of standard normal entries (column-major draw order).
pub fn random_matrix<S: Scalar>(m: usize, n: usize, seed: u64) -> Matrix<S> {
    let mut rng = rng_from_seed(seed);
    let data: Vec<S> = standard_normals(m * n, &mut rng)
        .into_iter()
        .map(S::from_f64)
        .collect();
    Matrix::from_col_major(m, n, data).expect("sized buffer")
}

/// Haar-distributed orthogonal matrix: the `Q` factor of a Gaussian matrix,
/// with columns signed so that `R` has a positive diagonal. The
/// factorization runs in `T`, so orthogonality holds to that precision.
pub fn random_orthogonal<T: Real>(n: usize, seed: u64) -> Matrix<T> {
    let g = random_matrix::<T>(n, n, seed);
    orthogonal_factor(&g)
}

pub(crate) fn orthogonal_factor<T: Real>(g: &Matrix<T>) -> Matrix<T> {
    let qr = HouseholderQr::new(g);
    let mut q = qr.q_full();
    for (j, d) in qr.r_diag().into_iter().enumerate() {
        if d < T::zero() {
            for x in q.col_mut(j) {
                *x = -*x;
            }
        }
    }
    q
}
