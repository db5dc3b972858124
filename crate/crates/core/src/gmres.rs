//! GMRES with modified Gram–Schmidt Arnoldi and incremental Givens
//! rotations, and the BA-GMRES outer loop for least-squares problems.

use serde::{Deserialize, Serialize};

use crate::linalg::{axpy, dot, norm2, Matrix};
use crate::precision::Real;
use crate::{Error, Result};

type ApplyFn<'a, T> = Box<dyn Fn(&[T]) -> Vec<T> + Send + Sync + 'a>;

/// A linear map `v ↦ Op·v` of shape `rows × cols`, with an optional
/// transpose.
pub struct OperatorHandle<'a, T> {
    rows: usize,
    cols: usize,
    apply: ApplyFn<'a, T>,
    apply_transpose: Option<ApplyFn<'a, T>>,
}

impl<'a, T: Real> OperatorHandle<'a, T> {
    pub fn new(rows: usize, cols: usize, apply: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'a) -> Self {
        Self {
            rows,
            cols,
            apply: Box::new(apply),
            apply_transpose: None,
        }
    }

    pub fn with_transpose(mut self, f: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'a) -> Self {
        self.apply_transpose = Some(Box::new(f));
        self
    }

    /// Wraps a dense matrix; the transpose is available.
    pub fn from_matrix(a: &'a Matrix<T>) -> Self {
        Self::new(a.rows(), a.cols(), move |x| a.matvec(x).expect("operator shape"))
            .with_transpose(move |x| a.transpose_matvec(x).expect("operator shape"))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        (self.apply)(x)
    }

    pub fn apply_transpose(&self, x: &[T]) -> Option<Vec<T>> {
        self.apply_transpose.as_ref().map(|f| f(x))
    }
}

/// Solver controls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmresOptions {
    pub max_iterations: usize,
    /// Relative tolerance on the stopping functional.
    pub rtol: f64,
    /// Second Gram–Schmidt pass in every Arnoldi step.
    pub reorthogonalize: bool,
    /// Stop on `‖Aᵀr_k‖ < rtol·‖Aᵀr₀‖` instead of the Arnoldi residual test.
    pub stop_on_normal_residual: bool,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            rtol: 1e-10,
            reorthogonalize: true,
            stop_on_normal_residual: false,
        }
    }
}

impl GmresOptions {
    /// Defaults for a working precision: reorthogonalization on in extended
    /// precision, off in binary64.
    pub fn for_precision<T: Real>() -> Self {
        Self {
            reorthogonalize: T::DIGITS > 17,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.rtol < 1.0) {
            return Err(Error::InvalidArgument(format!("rtol must lie in (0, 1), got {}", self.rtol)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    HappyBreakdown,
    MaxIterations,
    ZeroInitialResidual,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::HappyBreakdown => "happy_breakdown",
            Termination::MaxIterations => "max_iterations",
            Termination::ZeroInitialResidual => "zero_initial_residual",
        }
    }
}

/// One row of a convergence history.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord<T> {
    pub k: usize,
    /// `‖b − A x_k‖₂`.
    pub residual_norm: T,
    /// `‖B(b − A x_k)‖₂`, recomputed explicitly.
    pub precond_residual_norm: T,
    /// `‖Aᵀ(b − A x_k)‖₂` when the transpose is available.
    pub normal_residual_norm: Option<T>,
    /// Minimized quantity from the Givens recurrence, `‖w₀‖·|g_{k+1}|`.
    pub arnoldi_residual: T,
    pub bound: Option<T>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceTrace<T> {
    pub records: Vec<TraceRecord<T>>,
    pub x: Vec<T>,
    pub iterations: usize,
    pub termination: Termination,
}

impl<T: Real> ConvergenceTrace<T> {
    pub fn last(&self) -> &TraceRecord<T> {
        self.records.last().expect("trace has the k = 0 record")
    }

    /// Attaches `bounds[k]` to the record with index `k`.
    pub fn attach_bounds(&mut self, bounds: &[T]) {
        for r in &mut self.records {
            r.bound = bounds.get(r.k).copied();
        }
    }
}

/// Arnoldi basis and rotated Hessenberg, grown one column at a time.
struct Arnoldi<T> {
    basis: Vec<Vec<T>>,
    /// Columns of the rotated upper-triangular factor.
    r: Vec<Vec<T>>,
    cs: Vec<(T, T)>,
    /// Rotated `‖w₀‖e₁`.
    g: Vec<T>,
}

impl<T: Real> Arnoldi<T> {
    fn new(w0: &[T], beta: T) -> Self {
        let inv = T::one() / beta;
        Self {
            basis: vec![w0.iter().map(|&v| v * inv).collect()],
            r: Vec::new(),
            cs: Vec::new(),
            g: vec![beta],
        }
    }

    /// Adds one Krylov vector; returns the new subdiagonal entry.
    fn step(&mut self, mut w: Vec<T>, reorth: bool, iteration: usize) -> Result<T> {
        let j = self.basis.len() - 1;
        let mut h = vec![T::zero(); j + 2];
        let passes = if reorth { 2 } else { 1 };
        for _ in 0..passes {
            for (i, v) in self.basis.iter().enumerate() {
                let c = dot(v, &w);
                h[i] += c;
                axpy(-c, v, &mut w);
            }
        }
        let hn = norm2(&w);
        if !hn.is_finite() || h.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure {
                what: "non-finite value in Arnoldi step",
                iteration,
            });
        }
        h[j + 1] = hn;
        for (i, &(c, s)) in self.cs.iter().enumerate() {
            let a = h[i];
            let b = h[i + 1];
            h[i] = c * a + s * b;
            h[i + 1] = c * b - s * a;
        }
        let (a, b) = (h[j], h[j + 1]);
        let rho = a.hypot(b);
        let (c, s) = if rho == T::zero() {
            (T::one(), T::zero())
        } else {
            (a / rho, b / rho)
        };
        h[j] = rho;
        h.truncate(j + 1);
        self.cs.push((c, s));
        let gj = self.g[j];
        self.g[j] = c * gj;
        self.g.push(-s * gj);
        self.r.push(h);
        if hn > T::zero() {
            let inv = T::one() / hn;
            self.basis.push(w.into_iter().map(|v| v * inv).collect());
        }
        Ok(hn)
    }

    /// `x₀ + V_k y_k` for the current `k`.
    fn iterate(&self, x0: &[T]) -> Vec<T> {
        let k = self.r.len();
        let mut y = self.g[..k].to_vec();
        for i in (0..k).rev() {
            let mut s = y[i];
            for jj in i + 1..k {
                s -= self.r[jj][i] * y[jj];
            }
            y[i] = if self.r[i][i] == T::zero() { T::zero() } else { s / self.r[i][i] };
        }
        let mut x = x0.to_vec();
        for (v, &yi) in self.basis.iter().zip(&y) {
            axpy(yi, v, &mut x);
        }
        x
    }

    fn residual_estimate(&self) -> T {
        self.g.last().copied().unwrap_or(T::zero()).abs()
    }
}

/// Quantities measured at an iterate and whether the stopping test holds.
struct Observation<T> {
    record: TraceRecord<T>,
    stop: bool,
}

fn run_krylov<T: Real>(
    n: usize,
    apply: impl Fn(&[T]) -> Vec<T>,
    w0: Vec<T>,
    x0: &[T],
    opts: &GmresOptions,
    mut observe: impl FnMut(usize, &[T], T) -> Result<Observation<T>>,
) -> Result<ConvergenceTrace<T>> {
    opts.validate()?;
    let beta = norm2(&w0);
    if !beta.is_finite() {
        return Err(Error::NumericalFailure {
            what: "non-finite initial residual",
            iteration: 0,
        });
    }
    let first = observe(0, x0, beta)?;
    let mut records = vec![first.record];
    if beta == T::zero() {
        return Ok(ConvergenceTrace {
            records,
            x: x0.to_vec(),
            iterations: 0,
            termination: Termination::ZeroInitialResidual,
        });
    }
    let mut arnoldi = Arnoldi::new(&w0, beta);
    let breakdown = T::from_usize(n.max(1)) * T::epsilon() * beta;
    let mut x = x0.to_vec();
    let mut termination = Termination::MaxIterations;
    for k in 1..=opts.max_iterations {
        let v = arnoldi.basis.last().expect("basis").clone();
        let hn = arnoldi.step(apply(&v), opts.reorthogonalize, k)?;
        x = arnoldi.iterate(x0);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure {
                what: "non-finite iterate",
                iteration: k,
            });
        }
        let obs = observe(k, &x, arnoldi.residual_estimate())?;
        records.push(obs.record);
        if obs.stop {
            termination = Termination::Converged;
            break;
        }
        if hn <= breakdown {
            termination = Termination::HappyBreakdown;
            break;
        }
        if k >= n {
            break;
        }
    }
    let iterations = records.len() - 1;
    Ok(ConvergenceTrace {
        records,
        x,
        iterations,
        termination,
    })
}

fn check_len(op: &'static str, what: &str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            op,
            expected: format!("{what} of length {expected}"),
            found: format!("length {found}"),
        });
    }
    Ok(())
}

/// GMRES on a square operator. The stopping test is on the Arnoldi
/// residual, `‖r_k‖ ≤ rtol·‖r₀‖`.
pub fn gmres<T: Real>(
    op: &OperatorHandle<'_, T>,
    rhs: &[T],
    x0: Option<&[T]>,
    opts: &GmresOptions,
) -> Result<ConvergenceTrace<T>> {
    let (m, n) = op.dims();
    if m != n {
        return Err(Error::DimensionMismatch {
            op: "gmres",
            expected: "square operator".into(),
            found: format!("{m}x{n}"),
        });
    }
    check_len("gmres", "right-hand side", n, rhs.len())?;
    let zeros = vec![T::zero(); n];
    let x0 = x0.unwrap_or(&zeros);
    check_len("gmres", "initial guess", n, x0.len())?;

    let residual = |x: &[T]| -> Vec<T> {
        let ax = op.apply(x);
        rhs.iter().zip(&ax).map(|(&b, &a)| b - a).collect()
    };
    let r0 = residual(x0);
    let r0_norm = norm2(&r0);
    let rtol = T::from_f64(opts.rtol);
    run_krylov(n, |v| op.apply(v), r0, x0, opts, |k, x, est| {
        let r = residual(x);
        let rn = norm2(&r);
        let normal = op.apply_transpose(&r).map(|v| norm2(&v));
        let arnoldi_residual = if k == 0 { r0_norm } else { est };
        Ok(Observation {
            record: TraceRecord {
                k,
                residual_norm: rn,
                precond_residual_norm: rn,
                normal_residual_norm: normal,
                arnoldi_residual,
                bound: None,
            },
            stop: k > 0 && arnoldi_residual <= rtol * r0_norm,
        })
    })
}

/// BA-GMRES: GMRES on `B A x = B b` with `B` mapping `m`-vectors to
/// `n`-vectors. The true residual `b − A x_k` is recomputed at every step.
pub fn ba_gmres<T: Real>(
    a: &Matrix<T>,
    precond: &OperatorHandle<'_, T>,
    b: &[T],
    x0: Option<&[T]>,
    opts: &GmresOptions,
) -> Result<ConvergenceTrace<T>> {
    let (m, n) = a.shape();
    if precond.dims() != (n, m) {
        return Err(Error::DimensionMismatch {
            op: "ba_gmres",
            expected: format!("preconditioner of shape {n}x{m}"),
            found: format!("{}x{}", precond.dims().0, precond.dims().1),
        });
    }
    check_len("ba_gmres", "right-hand side", m, b.len())?;
    let zeros = vec![T::zero(); n];
    let x0 = x0.unwrap_or(&zeros);
    check_len("ba_gmres", "initial guess", n, x0.len())?;

    let residual = |x: &[T]| -> Vec<T> {
        let ax = a.matvec(x).expect("shape checked");
        b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect()
    };
    let r0 = residual(x0);
    let w0 = precond.apply(&r0);
    let w0_norm = norm2(&w0);
    let normal0 = norm2(&a.transpose_matvec(&r0).expect("shape checked"));
    let rtol = T::from_f64(opts.rtol);
    let apply = |v: &[T]| precond.apply(&a.matvec(v).expect("shape checked"));
    run_krylov(n, apply, w0, x0, opts, |k, x, est| {
        let r = residual(x);
        let br = norm2(&precond.apply(&r));
        let atr = norm2(&a.transpose_matvec(&r).expect("shape checked"));
        let arnoldi_residual = if k == 0 { w0_norm } else { est };
        let stop = k > 0
            && if opts.stop_on_normal_residual {
                atr < rtol * normal0
            } else {
                arnoldi_residual <= rtol * w0_norm
            };
        Ok(Observation {
            record: TraceRecord {
                k,
                residual_norm: norm2(&r),
                precond_residual_norm: br,
                normal_residual_norm: Some(atr),
                arnoldi_residual,
                bound: None,
            },
            stop,
        })
    })
}

/// Orthonormal Krylov basis `v₁..v_k` built by the same Arnoldi process the
/// solver uses; exposed for diagnostics.
pub fn arnoldi_basis<T: Real>(
    op: &OperatorHandle<'_, T>,
    start: &[T],
    k: usize,
    reorthogonalize: bool,
) -> Result<Vec<Vec<T>>> {
    let beta = norm2(start);
    if beta == T::zero() {
        return Ok(Vec::new());
    }
    let mut arnoldi = Arnoldi::new(start, beta);
    for it in 1..k {
        let v = arnoldi.basis.last().expect("basis").clone();
        let hn = arnoldi.step(op.apply(&v), reorthogonalize, it)?;
        if hn == T::zero() {
            break;
        }
    }
    arnoldi.basis.truncate(k);
    Ok(arnoldi.basis)
}
