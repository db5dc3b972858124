//! Nonsymmetric real eigenproblem: Hessenberg reduction, Francis double-shift
//! QR for the eigenvalues, complex inverse iteration for the eigenvectors.

use super::matrix::{dot, norm2, Matrix};
use super::qr::{apply_reflector, make_reflector};
use crate::precision::{Complex, Real, Scalar};
use crate::{Error, Result};

/// Largest order accepted by [`eig_nonsymmetric`].
pub const DEFAULT_EIG_CAP: usize = 1200;

/// Inverse-iteration steps per eigenvector.
const INVERSE_STEPS: usize = 3;

/// Eigenpairs of a real matrix, sorted by descending modulus; of a
/// conjugate pair the member with positive imaginary part comes first.
#[derive(Clone, Debug)]
pub struct EigenResult<T: Real> {
    pub eigenvalues: Vec<Complex<T>>,
    /// Unit 2-norm columns, first non-negligible component real positive.
    pub eigenvectors: Matrix<Complex<T>>,
}

impl<T: Real> EigenResult<T> {
    /// `max_i ‖A v_i − λ_i v_i‖₂`.
    pub fn max_residual(&self, a: &Matrix<T>) -> T {
        let ac = a.to_complex();
        let mut worst = T::zero();
        for (i, &lam) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.col(i);
            let mut r = ac.matvec(v).expect("square");
            for (ri, &vi) in r.iter_mut().zip(v) {
                *ri -= lam * vi;
            }
            worst = worst.max(norm2(&r));
        }
        worst
    }
}

/// Orthogonal reduction `A = Q H Qᵀ` with `H` upper Hessenberg.
pub fn hessenberg<T: Real>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = Matrix::<T>::identity(n);
    for k in 0..n.saturating_sub(2) {
        let (tau, beta) = make_reflector(&mut h.col_mut(k)[k + 1..]);
        let v: Vec<T> = h.col(k)[k + 2..].to_vec();
        h[(k + 1, k)] = beta;
        for x in &mut h.col_mut(k)[k + 2..] {
            *x = T::zero();
        }
        if tau == T::zero() {
            continue;
        }
        for j in k + 1..n {
            apply_reflector(&v, tau, &mut h.col_mut(j)[k + 1..]);
        }
        right_reflect(&mut h, k + 1, &v, tau);
        right_reflect(&mut q, k + 1, &v, tau);
    }
    (h, q)
}

/// `X[:, off..] <- X[:, off..] (I − tau v vᵀ)` with implicit `v[0] = 1`.
fn right_reflect<T: Real>(x: &mut Matrix<T>, off: usize, v_tail: &[T], tau: T) {
    let rows = x.rows();
    let mut w: Vec<T> = x.col(off).to_vec();
    for (t, &vt) in v_tail.iter().enumerate() {
        for (wi, &xi) in w.iter_mut().zip(x.col(off + 1 + t)) {
            *wi += xi * vt;
        }
    }
    for wi in &mut w {
        *wi *= tau;
    }
    for (xi, &wi) in x.col_mut(off).iter_mut().zip(&w) {
        *xi -= wi;
    }
    for (t, &vt) in v_tail.iter().enumerate() {
        let col = x.col_mut(off + 1 + t);
        for i in 0..rows {
            col[i] -= w[i] * vt;
        }
    }
}

/// Row-major 1-based scratch copy used by the QR sweep.
struct Work<T> {
    n: usize,
    a: Vec<T>,
}

impl<T: Copy> Work<T> {
    #[inline]
    fn get(&self, i: usize, j: usize) -> T {
        self.a[i * (self.n + 1) + j]
    }
    #[inline]
    fn set(&mut self, i: usize, j: usize, v: T) {
        self.a[i * (self.n + 1) + j] = v;
    }
}

fn sign_of<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix by the Francis implicit
/// double-shift QR iteration. Fails after `100·n` sweeps in total.
fn hqr<T: Real>(h: &Matrix<T>) -> Result<Vec<Complex<T>>> {
    let n = h.rows();
    let mut w = Work {
        n,
        a: vec![T::zero(); (n + 1) * (n + 1)],
    };
    let mut anorm = T::zero();
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            let v = h[(i - 1, j - 1)];
            w.set(i, j, v);
            anorm += v.abs();
        }
    }
    let eps = T::epsilon();
    let half = T::from_f64(0.5);
    let mut wr = vec![T::zero(); n + 1];
    let mut wi = vec![T::zero(); n + 1];
    let mut nn = n;
    let mut t = T::zero();
    let mut total = 0usize;
    let limit = 100 * n.max(1);
    let mut its = 0usize;

    while nn >= 1 {
        let mut l = nn;
        while l >= 2 {
            let mut s = w.get(l - 1, l - 1).abs() + w.get(l, l).abs();
            if s == T::zero() {
                s = anorm;
            }
            if w.get(l, l - 1).abs() <= eps * s {
                w.set(l, l - 1, T::zero());
                break;
            }
            l -= 1;
        }
        let mut x = w.get(nn, nn);
        if l == nn {
            wr[nn] = x + t;
            wi[nn] = T::zero();
            nn -= 1;
            its = 0;
            continue;
        }
        let mut y = w.get(nn - 1, nn - 1);
        let mut ww = w.get(nn, nn - 1) * w.get(nn - 1, nn);
        if l == nn - 1 {
            let p = half * (y - x);
            let q = p * p + ww;
            let mut z = q.abs().sqrt();
            x += t;
            if q >= T::zero() {
                z = p + sign_of(z, p);
                wr[nn - 1] = x + z;
                wr[nn] = x + z;
                if z != T::zero() {
                    wr[nn] = x - ww / z;
                }
                wi[nn - 1] = T::zero();
                wi[nn] = T::zero();
            } else {
                wr[nn - 1] = x + p;
                wr[nn] = x + p;
                wi[nn - 1] = -z;
                wi[nn] = z;
            }
            nn -= 2;
            its = 0;
            continue;
        }

        total += 1;
        if total > limit {
            return Err(Error::NumericalFailure {
                what: "Francis QR iteration did not converge",
                iteration: total,
            });
        }
        if its > 0 && its % 10 == 0 {
            // Exceptional shift.
            t += x;
            for i in 1..=nn {
                let d = w.get(i, i) - x;
                w.set(i, i, d);
            }
            let s = w.get(nn, nn - 1).abs() + w.get(nn - 1, nn - 2).abs();
            x = T::from_f64(0.75) * s;
            y = x;
            ww = T::from_f64(-0.4375) * s * s;
        }
        its += 1;

        let (mut p, mut q, mut r);
        let mut z;
        let mut m = nn - 2;
        loop {
            z = w.get(m, m);
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - ww) / w.get(m + 1, m) + w.get(m, m + 1);
            q = w.get(m + 1, m + 1) - z - rr - ss;
            r = w.get(m + 2, m + 1);
            let s = p.abs() + q.abs() + r.abs();
            p = p / s;
            q = q / s;
            r = r / s;
            if m == l {
                break;
            }
            let u = w.get(m, m - 1).abs() * (q.abs() + r.abs());
            let v = p.abs() * (w.get(m - 1, m - 1).abs() + z.abs() + w.get(m + 1, m + 1).abs());
            if u <= eps * v {
                break;
            }
            m -= 1;
        }
        for i in m + 2..=nn {
            w.set(i, i - 2, T::zero());
            if i != m + 2 {
                w.set(i, i - 3, T::zero());
            }
        }
        let mut k = m;
        while k < nn {
            if k != m {
                p = w.get(k, k - 1);
                q = w.get(k + 1, k - 1);
                r = T::zero();
                if k != nn - 1 {
                    r = w.get(k + 2, k - 1);
                }
                x = p.abs() + q.abs() + r.abs();
                if x != T::zero() {
                    p = p / x;
                    q = q / x;
                    r = r / x;
                }
            }
            let s = sign_of((p * p + q * q + r * r).sqrt(), p);
            if s != T::zero() {
                if k == m {
                    if l != m {
                        let v = -w.get(k, k - 1);
                        w.set(k, k - 1, v);
                    }
                } else {
                    w.set(k, k - 1, -s * x);
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q = q / p;
                r = r / p;
                for j in k..=nn {
                    let mut pp = w.get(k, j) + q * w.get(k + 1, j);
                    if k != nn - 1 {
                        pp += r * w.get(k + 2, j);
                        let v = w.get(k + 2, j) - pp * z;
                        w.set(k + 2, j, v);
                    }
                    let v = w.get(k + 1, j) - pp * y;
                    w.set(k + 1, j, v);
                    let v = w.get(k, j) - pp * x;
                    w.set(k, j, v);
                }
                let mmin = nn.min(k + 3);
                for i in l..=mmin {
                    let mut pp = x * w.get(i, k) + y * w.get(i, k + 1);
                    if k != nn - 1 {
                        pp += z * w.get(i, k + 2);
                        let v = w.get(i, k + 2) - pp * r;
                        w.set(i, k + 2, v);
                    }
                    let v = w.get(i, k + 1) - pp * q;
                    w.set(i, k + 1, v);
                    let v = w.get(i, k) - pp;
                    w.set(i, k, v);
                }
            }
            k += 1;
        }
    }
    Ok((1..=n).map(|i| Complex::new(wr[i], wi[i])).collect())
}

/// LU of the complex Hessenberg matrix `H − μI` with adjacent-row pivoting.
/// Exactly zero pivots are replaced by `tiny`.
struct ShiftedHessenbergLu<T: Real> {
    n: usize,
    u: Matrix<Complex<T>>,
    mult: Vec<Complex<T>>,
    swapped: Vec<bool>,
}

impl<T: Real> ShiftedHessenbergLu<T> {
    fn new(h: &Matrix<T>, mu: Complex<T>, tiny: T) -> Self {
        let n = h.rows();
        let mut u = Matrix::from_fn(n, n, |i, j| {
            if i > j + 1 {
                Complex::zero()
            } else if i == j {
                Complex::from_real(h[(i, j)]) - mu
            } else {
                Complex::from_real(h[(i, j)])
            }
        });
        let mut mult = vec![Complex::zero(); n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for k in 0..n.saturating_sub(1) {
            if u[(k + 1, k)].modulus() > u[(k, k)].modulus() {
                swapped[k] = true;
                for j in k..n {
                    u.col_mut(j).swap(k, k + 1);
                }
            }
            if u[(k, k)].is_zero() {
                u[(k, k)] = Complex::from_real(tiny);
            }
            let l = u[(k + 1, k)] / u[(k, k)];
            mult[k] = l;
            u[(k + 1, k)] = Complex::zero();
            if !l.is_zero() {
                for j in k + 1..n {
                    let ukj = u[(k, j)];
                    u[(k + 1, j)] -= l * ukj;
                }
            }
        }
        if n > 0 && u[(n - 1, n - 1)].is_zero() {
            u[(n - 1, n - 1)] = Complex::from_real(tiny);
        }
        Self {
            n,
            u,
            mult,
            swapped,
        }
    }

    fn solve(&self, b: &mut [Complex<T>]) {
        let n = self.n;
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                b.swap(k, k + 1);
            }
            let bk = b[k];
            b[k + 1] -= self.mult[k] * bk;
        }
        self.solve_upper(b);
    }

    /// `b <- U⁻¹ b`. Used alone, this is a solve with the implied right-hand
    /// side `Pᵀ L b`, which always picks up the small trailing pivot.
    fn solve_upper(&self, b: &mut [Complex<T>]) {
        let n = self.n;
        for j in (0..n).rev() {
            let c = self.u.col(j);
            b[j] /= c[j];
            let bj = b[j];
            for i in 0..j {
                b[i] -= c[i] * bj;
            }
        }
    }
}

fn normalize<T: Real>(x: &mut [Complex<T>]) {
    let nrm = norm2(x);
    if nrm > T::zero() {
        let inv = T::one() / nrm;
        for v in x.iter_mut() {
            *v = v.scale(inv);
        }
    }
}

/// Rotates `x` so that its first component above `sqrt(eps)·max|x_i|` is
/// real and positive.
pub(crate) fn fix_phase<T: Real>(x: &mut [Complex<T>]) {
    let big = x.iter().fold(T::zero(), |m, v| m.max(v.modulus()));
    if big == T::zero() {
        return;
    }
    let thresh = big * T::epsilon().sqrt();
    if let Some(lead) = x.iter().find(|v| v.modulus() > thresh) {
        let ph = lead.phase().conj();
        for v in x.iter_mut() {
            *v *= ph;
        }
        if let Some(lead) = x.iter_mut().find(|v| v.modulus() > thresh) {
            lead.im = T::zero();
        }
    }
}

/// Deterministic start vector; `salt` separates members of a multiple
/// eigenvalue.
fn start_vector<T: Real>(n: usize, salt: usize) -> Vec<Complex<T>> {
    (0..n)
        .map(|i| {
            let t = ((i + 1) * (2 * salt + 1)) as f64 * 0.618_033_988_749_894_9;
            Complex::from_f64(1.0 + 0.5 * (t - t.floor()))
        })
        .collect()
}

/// Eigenvalues and unit eigenvectors of a real square matrix of order at most
/// [`DEFAULT_EIG_CAP`].
pub fn eig_nonsymmetric<T: Real>(a: &Matrix<T>) -> Result<EigenResult<T>> {
    eig_nonsymmetric_with_cap(a, DEFAULT_EIG_CAP)
}

pub fn eig_nonsymmetric_with_cap<T: Real>(a: &Matrix<T>, cap: usize) -> Result<EigenResult<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "eig_nonsymmetric",
            expected: "square matrix".into(),
            found: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    let n = a.rows();
    if n > cap {
        return Err(Error::InvalidArgument(format!(
            "matrix order {n} exceeds the eigensolver cap {cap}"
        )));
    }
    if !a.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entries".into()));
    }
    let (h, q) = hessenberg(a);
    let mut values = hqr(&h)?;
    values.sort_by(|x, y| {
        y.modulus()
            .partial_cmp(&x.modulus())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(y.re.partial_cmp(&x.re).unwrap_or(std::cmp::Ordering::Equal))
            .then(y.im.partial_cmp(&x.im).unwrap_or(std::cmp::Ordering::Equal))
    });

    let hnorm = (0..n).fold(T::zero(), |m, j| {
        m.max(h.col(j).iter().fold(T::zero(), |s, v| s + v.abs()))
    });
    let eps3 = (hnorm * T::epsilon()).max(T::from_f64(f64::MIN_POSITIVE));
    let group_tol = T::from_f64(1e3) * T::epsilon() * hnorm;
    // Residual estimate `1/growth` small enough to stop iterating.
    let accept = T::from_usize(10 * n.max(1)) * eps3;
    let qc = q.to_complex();

    let mut hvecs: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    let mut vectors = Matrix::<Complex<T>>::zeros(n, n);
    for i in 0..n {
        let lam = values[i];
        if i > 0 && lam.im < T::zero() && values[i - 1] == lam.conj() {
            let prev: Vec<Complex<T>> = vectors.col(i - 1).iter().map(|v| v.conj()).collect();
            vectors.col_mut(i).copy_from_slice(&prev);
            hvecs.push(hvecs[i - 1].iter().map(|v| v.conj()).collect());
            continue;
        }
        // Earlier eigenvalues indistinguishable from this one.
        let group: Vec<usize> = (0..i)
            .filter(|&j| (values[j] - lam).modulus() <= group_tol)
            .collect();
        let mu = lam + Complex::from_real(eps3 * T::from_usize(group.len()));
        let lu = ShiftedHessenbergLu::new(&h, mu, eps3);
        let mut x = start_vector::<T>(n, group.len());
        normalize(&mut x);
        for step in 0..INVERSE_STEPS {
            // For ill-conditioned eigenvalues further full solves can lose
            // the growth the first one found, so stop once it suffices.
            if step == 0 {
                lu.solve_upper(&mut x);
            } else {
                lu.solve(&mut x);
            }
            let growth = norm2(&x);
            for &j in &group {
                let c = dot(&hvecs[j], &x);
                for (xi, &vj) in x.iter_mut().zip(&hvecs[j]) {
                    *xi -= c * vj;
                }
            }
            normalize(&mut x);
            if growth * accept >= T::one() {
                break;
            }
        }
        let mut v = qc.matvec(&x).expect("conforming");
        normalize(&mut v);
        fix_phase(&mut v);
        vectors.col_mut(i).copy_from_slice(&v);
        hvecs.push(x);
    }
    Ok(EigenResult {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

/// Eigenvalues only.
pub fn eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<Complex<T>>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "eigenvalues",
            expected: "square matrix".into(),
            found: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    let (h, _) = hessenberg(a);
    hqr(&h)
}
