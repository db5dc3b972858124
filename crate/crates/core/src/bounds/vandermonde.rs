//! Vandermonde least-squares factor and the residual bound built on it.

use serde::Serialize;

use super::decompose::{weighted_norm, EigenData};
use crate::linalg::{lstsq, norm2, Matrix};
use crate::precision::{Complex, DoubleDouble, ExtendedComplex, Real, Scalar};
use crate::{Error, Result};

/// `Λ_d^k` with entry `(i, j) = λ_i^(j+1)`, held in extended precision.
#[derive(Clone, Debug)]
pub struct VandermondeSystem {
    pub k: usize,
    pub lambdas: Vec<ExtendedComplex>,
    pub matrix: Matrix<ExtendedComplex>,
}

impl VandermondeSystem {
    pub fn new<T: Real>(lambdas: &[Complex<T>], k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("Vandermonde order k must be at least 1".into()));
        }
        if lambdas.is_empty() {
            return Err(Error::InvalidArgument("no eigenvalues".into()));
        }
        let lambdas: Vec<ExtendedComplex> = lambdas.iter().map(|z| z.to_extended()).collect();
        if lambdas.iter().any(|z| z.is_zero()) {
            return Err(Error::InvalidArgument("zero eigenvalue in Vandermonde system".into()));
        }
        let d = lambdas.len();
        let mut matrix = Matrix::zeros(d, k);
        for (i, &lam) in lambdas.iter().enumerate() {
            let mut p = lam;
            for j in 0..k {
                matrix[(i, j)] = p;
                p *= lam;
            }
        }
        Ok(Self { k, lambdas, matrix })
    }
}

/// `min_y ‖Λ_d^k y − 1‖₂` and its minimizer, solved by column-pivoted QR in
/// extended precision after scaling the columns to unit norm.
pub fn vandermonde_min<T: Real>(
    lambdas: &[Complex<T>],
    k: usize,
) -> Result<(DoubleDouble, Vec<ExtendedComplex>)> {
    let sys = VandermondeSystem::new(lambdas, k)?;
    let mut a = sys.matrix;
    let mut scales = Vec::with_capacity(k);
    for j in 0..k {
        let s = norm2(a.col(j));
        let inv = ExtendedComplex::from_real(DoubleDouble::ONE / s);
        for x in a.col_mut(j) {
            *x *= inv;
        }
        scales.push(s);
    }
    let ones = vec![ExtendedComplex::one(); a.rows()];
    let sol = lstsq(&a, &ones)?;
    let y = sol
        .solution
        .iter()
        .zip(&scales)
        .map(|(&z, &s)| z.scale(DoubleDouble::ONE / s))
        .collect();
    Ok((sol.residual_norm, y))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRecord {
    pub k: usize,
    pub vandermonde_min: DoubleDouble,
    /// `prefactor × vandermonde_min`.
    pub bound: DoubleDouble,
    pub cluster_bound: Option<DoubleDouble>,
    pub first_order: Option<DoubleDouble>,
}

/// Residual bound for `k = 1..k_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundSeries {
    /// `‖V_d diag(c)‖₂`.
    pub prefactor: DoubleDouble,
    pub records: Vec<BoundRecord>,
}

impl BoundSeries {
    pub fn bound_at(&self, k: usize) -> Option<DoubleDouble> {
        self.records.iter().find(|r| r.k == k).map(|r| r.bound)
    }

    /// Bounds indexed by `k`, with `k = 0` filled by `‖r₀‖`.
    pub fn by_iteration<T: Real>(&self, r0_norm: T) -> Vec<T> {
        let mut out = vec![r0_norm];
        out.extend(self.records.iter().map(|r| T::from_extended(r.bound)));
        out
    }
}

/// `‖V_d diag(c)‖₂ · min_y ‖Λ_d^k y − 1‖₂` for `k = 1..k_max`.
pub fn bound_curve<T: Real>(e: &EigenData<T>, k_max: usize) -> Result<BoundSeries> {
    let prefactor = weighted_norm(e).to_extended();
    let mut records = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let (vmin, _) = vandermonde_min(&e.lambdas, k)?;
        records.push(BoundRecord {
            k,
            vandermonde_min: vmin,
            bound: prefactor * vmin,
            cluster_bound: None,
            first_order: None,
        });
    }
    Ok(BoundSeries { prefactor, records })
}

/// Relative residual bound for orthonormal eigenvectors:
/// `(‖c‖_∞/‖c‖₂) · min_y ‖Λ_d^k y − 1‖₂`.
pub fn normal_case_bound<T: Real>(e: &EigenData<T>, k: usize) -> Result<DoubleDouble> {
    let off = e.max_offdiagonal_inner_product();
    if off > T::from_f64(1e-8) {
        return Err(Error::Inapplicable(format!(
            "eigenvectors are not orthonormal (max |v_i·v_j| = {:.3e})",
            off.to_f64()
        )));
    }
    let c_inf = e.weights.iter().fold(T::zero(), |m, c| m.max(c.modulus()));
    let c_2 = norm2(&e.weights);
    let (vmin, _) = vandermonde_min(&e.lambdas, k)?;
    Ok((c_inf / c_2).to_extended() * vmin)
}
