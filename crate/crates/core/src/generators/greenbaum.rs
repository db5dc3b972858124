//! Matrices with a prescribed GMRES residual curve and prescribed spectrum.
//!
//! With `U = I` the construction takes `b = g`, `B = [g, e₁, …, e_{n−1}]`
//! and `A = B A^B B⁻¹`, where `A^B` is the companion matrix of the desired
//! characteristic polynomial and `g_k² = ‖r_{k−1}‖² − ‖r_k‖²`.

use super::{param, ProblemInstance, ProblemMetadata};
use crate::linalg::{solve_linear, Matrix};
use crate::precision::{Complex, DoubleDouble, ExtendedComplex, Real, Scalar};
use crate::{Error, Result};

/// Residual norms `‖r₀‖ ≥ … ≥ ‖r_{n−1}‖ > 0` (with `‖r_n‖ = 0` implied) and
/// `n` nonzero eigenvalues closed under conjugation.
#[derive(Clone, Debug, PartialEq)]
pub struct PrescribedCurve {
    residual_norms: Vec<DoubleDouble>,
    eigenvalues: Vec<ExtendedComplex>,
}

impl PrescribedCurve {
    pub fn new(residual_norms: Vec<DoubleDouble>, eigenvalues: Vec<ExtendedComplex>) -> Result<Self> {
        let n = residual_norms.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty residual curve".into()));
        }
        if eigenvalues.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{n} residual norms but {} eigenvalues",
                eigenvalues.len()
            )));
        }
        for (k, r) in residual_norms.iter().enumerate() {
            if !(r.is_finite() && *r > DoubleDouble::ZERO) {
                return Err(Error::InvalidArgument(format!(
                    "residual norm {k} must be positive and finite"
                )));
            }
            if k > 0 && *r > residual_norms[k - 1] {
                return Err(Error::InvalidArgument(format!(
                    "residual norms increase at index {k}"
                )));
            }
        }
        if let Some(i) = eigenvalues.iter().position(|z| z.is_zero() || !z.is_finite()) {
            return Err(Error::InvalidArgument(format!("eigenvalue {i} is zero or not finite")));
        }
        check_conjugate_closed(&eigenvalues)?;
        Ok(Self {
            residual_norms,
            eigenvalues,
        })
    }

    pub fn from_f64(residual_norms: &[f64], eigenvalues: &[Complex<f64>]) -> Result<Self> {
        Self::new(
            residual_norms.iter().map(|&r| DoubleDouble::from_f64(r)).collect(),
            eigenvalues.iter().map(|z| z.to_extended()).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.residual_norms.len()
    }

    pub fn residual_norms(&self) -> &[DoubleDouble] {
        &self.residual_norms
    }

    pub fn eigenvalues(&self) -> &[ExtendedComplex] {
        &self.eigenvalues
    }

    /// `g_k = √(‖r_{k−1}‖² − ‖r_k‖²)`, `k = 1..n`.
    pub fn g(&self) -> Vec<DoubleDouble> {
        let r = &self.residual_norms;
        (0..r.len())
            .map(|k| {
                let next = r.get(k + 1).copied().unwrap_or(DoubleDouble::ZERO);
                ((r[k] - next) * (r[k] + next)).sqrt()
            })
            .collect()
    }
}

fn check_conjugate_closed(eigs: &[ExtendedComplex]) -> Result<()> {
    let tol = DoubleDouble::from_f64(1e-12);
    let mut used = vec![false; eigs.len()];
    for i in 0..eigs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let z = eigs[i];
        if z.im.abs() <= tol * z.modulus() {
            continue;
        }
        let partner = (0..eigs.len())
            .find(|&j| !used[j] && (eigs[j] - z.conj()).modulus() <= tol * z.modulus());
        match partner {
            Some(j) => used[j] = true,
            None => {
                return Err(Error::InvalidArgument(format!(
                    "eigenvalue {i} has no conjugate partner"
                )))
            }
        }
    }
    Ok(())
}

/// Coefficients `a₀, …, a_{n−1}` of the monic `∏(λ − λ_i) = λⁿ + Σ a_j λʲ`,
/// accumulated root by root in extended precision.
pub fn characteristic_polynomial(eigs: &[ExtendedComplex]) -> Vec<DoubleDouble> {
    let mut c = vec![ExtendedComplex::one()];
    for &root in eigs {
        let mut next = vec![ExtendedComplex::zero(); c.len() + 1];
        for (j, &cj) in c.iter().enumerate() {
            next[j + 1] += cj;
            next[j] -= root * cj;
        }
        c = next;
    }
    c.pop();
    c.into_iter().map(|z| z.re).collect()
}

/// Companion matrix with ones on the subdiagonal and `−a₀, …, −a_{n−1}` in
/// the last column.
pub fn companion_matrix(coeffs: &[DoubleDouble]) -> Matrix<DoubleDouble> {
    let n = coeffs.len();
    let mut m = Matrix::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = DoubleDouble::ONE;
    }
    for (i, &a) in coeffs.iter().enumerate() {
        m[(i, n - 1)] = -a;
    }
    m
}

pub fn greenbaum_construct<T: Real>(pc: &PrescribedCurve) -> Result<ProblemInstance<T>> {
    let companion = companion_matrix(&characteristic_polynomial(pc.eigenvalues()));
    let mut inst = greenbaum_from_companion::<T>(&companion, &pc.g())?;
    inst.metadata.eigenvalues = Some(pc.eigenvalues().iter().map(|z| z.cast()).collect());
    inst.metadata.parameters.push(param(
        "residual_norms",
        pc.residual_norms()
            .iter()
            .map(|r| r.to_f64().to_string())
            .collect::<Vec<_>>()
            .join(" "),
    ));
    Ok(inst)
}

/// `A = B C B⁻¹` with `B = [g, e₁, …, e_{n−1}]`, computed in extended
/// precision and rounded to `T`; the rhs is `g`.
pub fn greenbaum_from_companion<T: Real>(
    companion: &Matrix<DoubleDouble>,
    g: &[DoubleDouble],
) -> Result<ProblemInstance<T>> {
    let n = g.len();
    if companion.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            op: "greenbaum_from_companion",
            expected: format!("{n} x {n} companion matrix"),
            found: format!("{} x {}", companion.rows(), companion.cols()),
        });
    }
    let b = Matrix::from_fn(n, n, |i, j| match j {
        0 => g[i],
        _ if i + 1 == j => DoubleDouble::ONE,
        _ => DoubleDouble::ZERO,
    });
    // X B = C  <=>  Bᵀ Xᵀ = Cᵀ.
    let xt = solve_linear(&b.transpose(), &companion.transpose()).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::Construction(
            "B = [g, e1, ..., e(n-1)] is singular; perturb the residual curve so that the \
             last residual norm is nonzero"
                .into(),
        ),
        other => other,
    })?;
    let a = b.matmul(&xt.transpose())?;
    let metadata = ProblemMetadata {
        name: "greenbaum".into(),
        seed: None,
        parameters: vec![param("n", n)],
        singular_values: None,
        eigenvalues: None,
        consistent: true,
    };
    ProblemInstance::new(
        a.map(T::from_extended),
        g.iter().map(|&x| T::from_extended(x)).collect(),
        metadata,
    )
}

fn dd(text: &str) -> DoubleDouble {
    text.parse().expect("valid literal")
}

fn example_curve() -> PrescribedCurve {
    PrescribedCurve::new(
        vec![dd("1"), dd("0.99"), dd("0.98")],
        ["1", "1.01", "1.001"]
            .iter()
            .map(|s| ExtendedComplex::from_real(dd(s)))
            .collect(),
    )
    .expect("valid curve")
}

/// Residual curve `(1, 0.99, 0.98)` with eigenvalues `{1, 1.01, 1.001}`.
pub fn three_by_three_example<T: Real>() -> ProblemInstance<T> {
    greenbaum_construct(&example_curve()).expect("nonsingular construction")
}

/// As [`three_by_three_example`] but with the constant coefficient of the
/// companion matrix rounded to four decimals (`1.0110` instead of
/// `1.01101`).
pub fn three_by_three_rounded_example<T: Real>() -> ProblemInstance<T> {
    let mut c = companion_matrix(&[dd("-1.011"), dd("3.02201"), dd("-3.011")]);
    c[(0, 2)] = dd("1.011");
    let mut inst = greenbaum_from_companion(&c, &example_curve().g()).expect("nonsingular construction");
    inst.metadata.name = "greenbaum-rounded".into();
    inst
}
