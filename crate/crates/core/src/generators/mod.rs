//! Test problems: the rank-deficient stair matrix, the exponentially
//! decaying nonsymmetric matrix, prescribed-convergence constructions and
//! Matrix Market files.

mod exp_decay;
mod greenbaum;
mod matrix_market;
mod stair;

pub use exp_decay::{exp_decay_matrix, sine_orthogonal};
pub use greenbaum::{
    characteristic_polynomial, companion_matrix, greenbaum_construct, greenbaum_from_companion,
    three_by_three_example, three_by_three_rounded_example, PrescribedCurve,
};
pub use matrix_market::{
    load_matrix_market, load_matrix_market_with_rhs, parse_matrix_market, read_matrix_market,
    write_matrix_market_array,
};
pub use stair::{stair_inner, stair_matrix, stair_matrix_with, StairRhs, STAIR_COLS, STAIR_ROWS};

use crate::linalg::{norm2, Matrix};
use crate::precision::{Complex, Real};
use crate::{Error, Result};

/// Name, seed and construction parameters of a problem, plus its spectrum
/// when it is known analytically.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProblemMetadata {
    pub name: String,
    pub seed: Option<u64>,
    pub parameters: Vec<(String, String)>,
    pub singular_values: Option<Vec<f64>>,
    pub eigenvalues: Option<Vec<Complex<f64>>>,
    /// False when `b` was deliberately left with a component outside `R(A)`.
    pub consistent: bool,
}

/// A matrix `A`, a right-hand side `b` and where they came from.
#[derive(Clone, Debug)]
pub struct ProblemInstance<T: Real> {
    pub a: Matrix<T>,
    pub b: Vec<T>,
    pub metadata: ProblemMetadata,
}

impl<T: Real> ProblemInstance<T> {
    pub fn new(a: Matrix<T>, b: Vec<T>, metadata: ProblemMetadata) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                op: "ProblemInstance",
                expected: format!("rhs of length {}", a.rows()),
                found: format!("length {}", b.len()),
            });
        }
        if !a.is_finite() || b.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry in problem data".into()));
        }
        Ok(Self { a, b, metadata })
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    /// `‖b − A x*‖ / ‖b‖` for the least-squares solution `x*`, i.e. the part
    /// of `b` outside `R(A)`.
    pub fn range_defect(&self) -> Result<T> {
        let nb = norm2(&self.b);
        if nb == T::zero() {
            return Ok(T::zero());
        }
        let ls = crate::linalg::lstsq(&self.a, &self.b)?;
        Ok(ls.residual_norm / nb)
    }

    /// Same problem in another precision (through binary64).
    pub fn cast<U: Real>(&self) -> ProblemInstance<U> {
        ProblemInstance {
            a: self.a.cast(),
            b: self.b.iter().map(|x| U::from_f64(x.to_f64())).collect(),
            metadata: self.metadata.clone(),
        }
    }
}

fn param(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

fn unit<T: Real>(mut v: Vec<T>) -> Vec<T> {
    let nrm = norm2(&v);
    for x in &mut v {
        *x /= nrm;
    }
    v
}
