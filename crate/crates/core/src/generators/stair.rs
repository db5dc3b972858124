//! Rank-deficient 100 × 20 "stair" matrix `A = U S Vᵀ`.

use super::{param, unit, ProblemInstance, ProblemMetadata};
use crate::linalg::random::{rng_from_seed, standard_normals};
use crate::linalg::{random_orthogonal, Matrix};
use crate::precision::Real;

pub const STAIR_ROWS: usize = 100;
pub const STAIR_COLS: usize = 20;
const STAIR_RANK: usize = 10;

/// How the right-hand side of the stair problem is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StairRhs {
    /// Seeded random unit vector projected onto `R(A)`, then normalized.
    RangeProjected,
    /// Seeded random unit vector, left with its component outside `R(A)`.
    Inconsistent,
    /// `A · (1, …, 1)ᵀ`.
    OnesImage,
}

/// Inner factor `S`: row `p` (1-based, `p ≤ 10`) holds `(11 − p)/10` in
/// columns `2p − 1` and `2p`.
pub fn stair_inner<T: Real>() -> Matrix<T> {
    let mut s = Matrix::zeros(STAIR_ROWS, STAIR_COLS);
    let ten = T::from_usize(10);
    for p in 1..=STAIR_RANK {
        let v = T::from_usize(11 - p) / ten;
        s[(p - 1, 2 * p - 2)] = v;
        s[(p - 1, 2 * p - 1)] = v;
    }
    s
}

pub fn stair_matrix<T: Real>(seed: u64) -> ProblemInstance<T> {
    stair_matrix_with(seed, StairRhs::RangeProjected)
}

/// `A = U S Vᵀ` with `U = random_orthogonal(100, seed)` and
/// `V = random_orthogonal(20, seed + 1)`; the rhs draw uses `seed + 2`.
pub fn stair_matrix_with<T: Real>(seed: u64, rhs: StairRhs) -> ProblemInstance<T> {
    let u = random_orthogonal::<T>(STAIR_ROWS, seed);
    let v = random_orthogonal::<T>(STAIR_COLS, seed.wrapping_add(1));
    let a = u
        .matmul(&stair_inner())
        .and_then(|us| us.matmul(&v.transpose()))
        .expect("conforming factors");

    let draw = || -> Vec<T> {
        let mut rng = rng_from_seed(seed.wrapping_add(2));
        unit(
            standard_normals(STAIR_ROWS, &mut rng)
                .into_iter()
                .map(T::from_f64)
                .collect(),
        )
    };
    let b = match rhs {
        StairRhs::RangeProjected => {
            // R(A) is spanned by the first ten columns of U.
            let ur = u.columns(0..STAIR_RANK);
            let coeffs = ur.transpose_matvec(&draw()).expect("length 100");
            unit(ur.matvec(&coeffs).expect("length 10"))
        }
        StairRhs::Inconsistent => draw(),
        StairRhs::OnesImage => a.matvec(&vec![T::one(); STAIR_COLS]).expect("length 20"),
    };

    let mut sv: Vec<f64> = (1..=STAIR_RANK)
        .map(|p| std::f64::consts::SQRT_2 * (11 - p) as f64 / 10.0)
        .collect();
    sv.resize(STAIR_COLS, 0.0);
    let metadata = ProblemMetadata {
        name: "stair".into(),
        seed: Some(seed),
        parameters: vec![
            param("m", STAIR_ROWS),
            param("n", STAIR_COLS),
            param("rhs", format!("{rhs:?}")),
        ],
        singular_values: Some(sv),
        eigenvalues: None,
        consistent: rhs != StairRhs::Inconsistent,
    };
    ProblemInstance { a, b, metadata }
}
