//! Acceptance checks. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero when any criterion fails.
//!
//! The Maragal_3T check needs the matrix file in `KRYBOUND_DATA_DIR` and only
//! runs with `--include-ignored` (or `--ignored`).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use krybound_core::bounds::{
    bound_curve, cluster_assign, cluster_poly_bound, decompose_rhs, first_order_estimate, kendall_tau,
    log_decrements, log_second_differences, vandermonde_min, weighted_norm, ClusterMode, EigenData,
};
use krybound_core::generators::{
    exp_decay_matrix, load_matrix_market, stair_matrix, three_by_three_example, three_by_three_rounded_example,
    PrescribedCurve,
};
use krybound_core::gmres::{gmres, GmresOptions, OperatorHandle};
use krybound_core::linalg::{dot, eig_nonsymmetric, jacobi_svd, norm2, random_matrix, Lu, Matrix};
use krybound_core::nrsor::{explicit_preconditioner, nrsor_apply, nrsor_ba_gmres, preconditioned_matrix, NrsorConfig};
use krybound_core::{Complex, DoubleDouble, Real, Scalar};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(x: f64, want: f64) -> f64 {
    ((x - want) / want).abs()
}

/// Preconditioned residual norms `‖B r_k‖` for `k = 0..`.
fn precond_trace<T: Real>(a: &Matrix<T>, b: &[T], omega: T, l: usize, rtol: f64, maxit: usize) -> Vec<T> {
    let cfg = NrsorConfig::new(a, omega, l).expect("valid NR-SOR parameters");
    let opts = GmresOptions {
        rtol,
        max_iterations: maxit,
        ..GmresOptions::for_precision::<T>()
    };
    nrsor_ba_gmres(a, &cfg, b, None, &opts)
        .expect("BA-GMRES runs")
        .records
        .iter()
        .map(|r| r.precond_residual_norm)
        .collect()
}

/// Eigen-expansion of `B b` in the eigenvectors of `I − H^l`.
fn preconditioned_expansion<T: Real>(a: &Matrix<T>, b: &[T], omega: T, l: usize) -> (Matrix<T>, EigenData<T>) {
    let m = preconditioned_matrix(a, omega, l).expect("square splitting");
    let cfg = NrsorConfig::new(a, omega, l).expect("valid NR-SOR parameters");
    let r0 = nrsor_apply(a, &cfg, b).expect("conforming rhs");
    let e = decompose_rhs(&m, &r0).expect("r0 lies in the eigenvector span");
    (m, e)
}

fn greenbaum_three_by_three() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let curve = PrescribedCurve::from_f64(
        &[1.0, 0.99, 0.98],
        &[Complex::new(1.0, 0.0), Complex::new(1.01, 0.0), Complex::new(1.001, 0.0)],
    )
    .expect("valid curve");
    let g: Vec<f64> = curve.g().iter().map(|x| x.to_f64()).collect();
    let g_err = g.iter().zip([0.1411, 0.1404, 0.98]).map(|(x, w)| (x - w).abs()).fold(0.0, f64::max);
    pass &= g_err <= 1e-4;
    notes.push(format!("g err {g_err:.1e}"));

    let p = three_by_three_example::<f64>();
    let opts = GmresOptions {
        rtol: 1e-14,
        max_iterations: 3,
        ..GmresOptions::default()
    };
    let t = gmres(&OperatorHandle::from_matrix(&p.a), &p.b, None, &opts).expect("GMRES runs");
    let res: Vec<f64> = t.records.iter().map(|r| r.residual_norm).collect();
    let r_err = res.iter().zip([1.0, 0.99, 0.98, 0.0]).map(|(x, w)| (x - w).abs()).fold(0.0, f64::max);
    pass &= res.len() == 4 && r_err <= 1e-6;
    notes.push(format!("residual err {r_err:.1e}"));

    let q = three_by_three_rounded_example::<f64>();
    let e = decompose_rhs(&q.a, &q.b).expect("diagonalizable");
    let checks = [
        ("vmin1", vandermonde_min(&e.lambdas, 1).expect("k = 1").0.to_f64(), 3.7103e-2, 0.05),
        ("vmin2", vandermonde_min(&e.lambdas, 2).expect("k = 2").0.to_f64(), 7.9480e-4, 0.05),
        ("bound1", bound_curve(&e, 2).expect("bound").records[0].bound.to_f64(), 1.1120e2, 0.05),
        ("bound2", bound_curve(&e, 2).expect("bound").records[1].bound.to_f64(), 2.3822, 0.05),
        ("kappa", e.condition_number(), 8.3057e3, 0.01),
        ("prefactor", weighted_norm(&e), 2.9972e3, 0.01),
    ];
    for (name, got, want, tol) in checks {
        let ok = rel(got, want) <= tol;
        pass &= ok;
        notes.push(format!("{name} {got:.5e}{}", if ok { "" } else { " (off)" }));
    }
    outcome(pass, notes.join(", "))
}

const TABLE3_ACTUAL: [[f64; 2]; 5] = [
    [7.0265e-1, 6.8492e-1],
    [8.7823e-1, 8.7720e-1],
    [8.8667e-1, 1.4074e-1],
    [8.7730e-1, 2.1902e-2],
    [8.6351e-1, 4.1286e-3],
];
const TABLE3_BOUND: [[f64; 2]; 5] = [
    [4.2212, 3.9239],
    [4.0204, 2.3155],
    [3.8964, 4.7470e-1],
    [3.7759, 8.7574e-2],
    [3.6570, 1.7079e-2],
];

fn table3() -> Outcome {
    let p = three_by_three_example::<f64>();
    let mut worst: f64 = 0.0;
    let mut within = 0;
    for l in 1..=5 {
        let trace = precond_trace(&p.a, &p.b, 1.1, l, 1e-15, 2);
        let (_, e) = preconditioned_expansion(&p.a, &p.b, 1.1, l);
        let bounds = bound_curve(&e, 2).expect("bound");
        for k in 1..=2 {
            let actual = trace.get(k).copied().unwrap_or(0.0);
            let bound = bounds.records[k - 1].bound.to_f64();
            for (got, want) in [(actual, TABLE3_ACTUAL[l - 1][k - 1]), (bound, TABLE3_BOUND[l - 1][k - 1])] {
                let r = rel(got, want);
                worst = worst.max(r);
                within += usize::from(r <= 1e-3);
            }
        }
    }
    outcome(worst <= 1e-3, format!("{within}/20 entries within 1e-3, worst relative error {worst:.3e}"))
}

fn stair_spectra() -> Outcome {
    let p = stair_matrix::<f64>(438);
    let sv = jacobi_svd(&p.a).singular_values;
    let sv_err = (0..20)
        .map(|i| {
            let want = if i < 10 { 2f64.sqrt() * (10 - i) as f64 / 10.0 } else { 0.0 };
            (sv[i] - want).abs()
        })
        .fold(0.0, f64::max);
    let ata = p.a.transpose().matmul(&p.a).expect("conforming");
    let mut eigs: Vec<f64> = eig_nonsymmetric(&ata).expect("20 x 20").eigenvalues.iter().map(|z| z.re).collect();
    eigs.sort_by(|a, b| b.total_cmp(a));
    let table = [2.00, 1.62, 1.28, 0.98, 0.72, 0.50, 0.32, 0.18, 0.08, 0.02];
    let eig_err = eigs.iter().zip(table).map(|(x, w)| (x - w).abs()).fold(0.0, f64::max);
    outcome(
        sv_err <= 1e-10 && eig_err <= 1e-2,
        format!("singular value err {sv_err:.1e}, AᵀA eigenvalue err {eig_err:.1e}"),
    )
}

fn stair_clusters() -> Outcome {
    type D = DoubleDouble;
    let p = stair_matrix::<D>(438);
    let one = D::ONE;
    let (m, e) = preconditioned_expansion(&p.a, &p.b, one, 8);
    let eigs: Vec<Complex<f64>> = eig_nonsymmetric(&m)
        .expect("20 x 20")
        .eigenvalues
        .iter()
        .map(|z| Complex::new(z.re.to_f64(), z.im.to_f64()))
        .collect();
    let dist1 = |z: &Complex<f64>| (z.re - 1.0).hypot(z.im);
    let near_one = eigs.iter().filter(|z| dist1(z) <= 1e-6).count();
    let near_9999 = eigs.iter().any(|z| (z.re - 0.9999).abs() <= 1e-3 && z.im.abs() <= 1e-3 && dist1(z) > 1e-6);
    let mid = eigs.iter().any(|z| z.im == 0.0 && (0.85..=0.98).contains(&z.re));
    let low = eigs.iter().any(|z| z.im == 0.0 && (0.3..=0.7).contains(&z.re));

    let trace = precond_trace(&p.a, &p.b, one, 8, 1e-30, 8);
    let r4 = trace.get(4).map_or(f64::INFINITY, |x| x.to_f64());
    let r6 = trace.get(6).map_or(f64::INFINITY, |x| x.to_f64());

    let ca = cluster_assign(&e.lambdas, &ClusterMode::Count(6)).expect("six centers");
    let chain = cluster_poly_bound(&e, &ca, 6).expect("degree 6").to_f64();
    let first = first_order_estimate(&e, &ca, 6).map(|x| x.to_f64()).unwrap_or(f64::NAN);
    let pass = near_one >= 5 && near_9999 && mid && low && r4 <= 1e-10 && r6 <= 1e-24 && chain <= 1e-26;
    outcome(
        pass,
        format!(
            "{near_one} eigenvalues at 1, 0.9999 {near_9999}, [0.85,0.98] {mid}, [0.3,0.7] {low}; \
             r4 {r4:.2e}, r6 {r6:.2e}; cluster bound {chain:.2e} (first-order {first:.2e}, ε {:.2e})",
            ca.epsilon.to_f64()
        ),
    )
}

/// `W D W⁻¹` with eigenvalues in `(0.55, 1.45)`, some in complex pairs.
fn diagonalizable_system(seed: u64) -> (Matrix<f64>, Vec<f64>) {
    let n = 2 + (seed % 11) as usize;
    let w = random_matrix::<f64>(n, n, 7 * seed + 1);
    let z = random_matrix::<f64>(n, 3, 7 * seed + 2);
    let mut d = Matrix::<f64>::zeros(n, n);
    let mut i = 0;
    while i < n {
        let re = 1.0 + 0.45 * z[(i, 0)].tanh();
        if i + 1 < n && z[(i, 2)] > 0.5 {
            let im = 0.3 * z[(i, 1)].tanh();
            d[(i, i)] = re;
            d[(i + 1, i + 1)] = re;
            d[(i, i + 1)] = -im;
            d[(i + 1, i)] = im;
            i += 2;
        } else {
            d[(i, i)] = re;
            i += 1;
        }
    }
    let winv = Lu::new(&w).expect("nonsingular").inverse().expect("nonsingular");
    let a = w.matmul(&d).and_then(|x| x.matmul(&winv)).expect("conforming");
    let b = random_matrix::<f64>(n, 1, 7 * seed + 3).col(0).to_vec();
    let nb = norm2(&b);
    (a, b.iter().map(|x| x / nb).collect())
}

fn bound_violations<T: Real>(cases: u64, rtol: f64) -> (usize, usize, f64) {
    let (mut violations, mut checked, mut worst) = (0, 0, f64::NEG_INFINITY);
    for seed in 0..cases {
        let (a, b) = diagonalizable_system(seed);
        let a: Matrix<T> = a.cast();
        let b: Vec<T> = b.iter().map(|&x| T::from_f64(x)).collect();
        let opts = GmresOptions {
            rtol,
            max_iterations: a.rows(),
            reorthogonalize: true,
            ..GmresOptions::default()
        };
        let t = gmres(&OperatorHandle::from_matrix(&a), &b, None, &opts).expect("GMRES runs");
        let e = decompose_rhs(&a, &b).expect("diagonalizable");
        let bounds = bound_curve(&e, t.iterations.max(1)).expect("bound").by_iteration(e.r0_norm);
        for r in &t.records {
            let excess = r.arnoldi_residual.to_f64() - bounds[r.k].to_f64();
            worst = worst.max(excess);
            checked += 1;
            violations += usize::from(excess > 1e-12);
        }
    }
    (violations, checked, worst)
}

fn upper_bound_invariant() -> Outcome {
    let (v64, c64, w64) = bound_violations::<f64>(200, 1e-14);
    let (vdd, cdd, wdd) = bound_violations::<DoubleDouble>(200, 1e-28);
    outcome(
        v64 + vdd == 0,
        format!(
            "f64: {v64} violations in {c64} iterates (max excess {w64:.1e}); \
             extended: {vdd} in {cdd} (max excess {wdd:.1e})"
        ),
    )
}

fn nrsor_equivalence() -> Outcome {
    let mut worst_apply: f64 = 0.0;
    let mut worst_angle: f64 = 0.0;
    for s in 0..100u64 {
        let n = 2 + (s % 7) as usize;
        let a = random_matrix::<f64>(n + 2, n, 1000 + s);
        let omega = 0.05 + 1.9 * ((s as f64) * 0.618_033_988_749_895).fract();
        let l = 1 + (s % 4) as usize;
        let u = random_matrix::<f64>(n + 2, 1, 2000 + s).col(0).to_vec();
        let cfg = NrsorConfig::new(&a, omega, l).expect("valid parameters");
        let swept = nrsor_apply(&a, &cfg, &u).expect("conforming");
        let explicit = explicit_preconditioner(&a, omega, l).and_then(|p| p.matvec(&u)).expect("conforming");
        let diff: Vec<f64> = swept.iter().zip(&explicit).map(|(x, y)| x - y).collect();
        worst_apply = worst_apply.max(norm2(&diff) / norm2(&explicit));

        // Every eigenvector of I − H⁴ is an eigenvector of I − H⁸.
        let m4 = preconditioned_matrix(&a, omega, 4).expect("square");
        let m8 = preconditioned_matrix(&a, omega, 8).expect("square").to_complex();
        let eig = eig_nonsymmetric(&m4).expect("small");
        for j in 0..n {
            let v = eig.eigenvectors.col(j);
            let w = m8.matvec(v).expect("conforming");
            let proj = dot(v, &w);
            let off: Vec<Complex<f64>> = w.iter().zip(v).map(|(&wi, &vi)| wi - proj * vi).collect();
            worst_angle = worst_angle.max((norm2(&off) / norm2(&w)).min(1.0).asin());
        }
    }
    outcome(
        worst_apply <= 1e-12 && worst_angle <= 1e-6,
        format!("sweep vs explicit {worst_apply:.1e} relative, eigenvector angle l=4 vs l=8 {worst_angle:.1e}"),
    )
}

/// Three real clusters and a conjugate pair of clusters, two members each.
fn synthetic_clusters(t: f64, seed: u64) -> (EigenData<f64>, Vec<Complex<f64>>) {
    let centers = vec![
        Complex::new(1.0, 0.0),
        Complex::new(0.5, 0.0),
        Complex::new(0.25, 0.0),
        Complex::new(0.8, 0.3),
        Complex::new(0.8, -0.3),
    ];
    let z = random_matrix::<f64>(10, 3, seed);
    let mut lambdas = Vec::new();
    for (j, &c) in centers[..4].iter().enumerate() {
        for m in 0..2 {
            let i = 2 * j + m;
            let size = 1e-7 + 9e-7 * z[(i, 0)].tanh().abs();
            let off = if z[(i, 1)] > 0.0 { size } else { -size };
            lambdas.push(c + Complex::new(t * off, 0.0));
        }
    }
    // Conjugates of the members around 0.8 + 0.3i.
    lambdas.push(lambdas[6].conj());
    lambdas.push(lambdas[7].conj());
    let d = lambdas.len();
    let re = random_matrix::<f64>(d + 2, d, seed + 1);
    let im = random_matrix::<f64>(d + 2, d, seed + 2);
    let mut vectors = Matrix::from_fn(d + 2, d, |i, j| Complex::new(re[(i, j)], im[(i, j)]));
    for j in 0..d {
        let nrm = norm2(vectors.col(j));
        for x in vectors.col_mut(j) {
            *x = x.scale(1.0 / nrm);
        }
    }
    let weights: Vec<Complex<f64>> = (0..d).map(|i| Complex::new(1.0 + z[(i, 2)].abs(), 0.0)).collect();
    let e = EigenData {
        lambdas,
        vectors,
        weights,
        unexplained_residual: 0.0,
        r0_norm: 1.0,
    };
    (e, centers)
}

fn cluster_scaling() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let (base, centers) = synthetic_clusters(1.0, 50 + seed);
        let mode = ClusterMode::Centers(centers);
        for k in [5, 7] {
            let b1 = cluster_poly_bound(&base, &cluster_assign(&base.lambdas, &mode).expect("assign"), k)
                .expect("bound")
                .to_f64();
            for t in [0.5, 0.25] {
                let (e, _) = synthetic_clusters(t, 50 + seed);
                let ca = cluster_assign(&e.lambdas, &mode).expect("assign");
                let bt = cluster_poly_bound(&e, &ca, k).expect("bound").to_f64();
                worst = worst.max(rel(bt, t * b1));
            }
        }
    }
    outcome(worst <= 0.1, format!("max |bound(t)/(t·bound(1)) − 1| = {worst:.2e}"))
}

fn exp_decay_cotrend() -> Outcome {
    type D = DoubleDouble;
    let p = exp_decay_matrix::<D>(201, 0).expect("n = 201");
    let res: Vec<f64> = precond_trace(&p.a, &p.b, D::ONE, 1, 1e-14, 200).iter().map(|x| x.to_f64()).collect();
    let (_, e) = preconditioned_expansion(&p.a, &p.b, D::ONE, 1);
    let bnd: Vec<f64> = bound_curve(&e, res.len() - 1)
        .expect("bound")
        .by_iteration(e.r0_norm)
        .iter()
        .map(|x| x.to_f64())
        .collect();

    // k = 0 carries ‖r₀‖ in both series, not a bound value.
    let dr = log_decrements(&res[1..]);
    let db = log_decrements(&bnd[1..]);
    let n = dr.len().min(db.len());
    let tau = kendall_tau(&dr[..n], &db[..n]).unwrap_or(f64::NAN);
    let final_third = |sd: Vec<f64>| -> f64 {
        let start = sd.len() - sd.len().div_ceil(3);
        sd[start..].iter().sum()
    };
    let bend_res = final_third(log_second_differences(&res[1..]));
    let bend_bnd = final_third(log_second_differences(&bnd[1..]));
    outcome(
        tau > 0.6 && bend_res < 0.0 && bend_bnd < 0.0,
        format!(
            "{} iterations, final residual {:.2e}, Kendall tau {tau:.3}, final-third curvature residual {bend_res:.3} bound {bend_bnd:.3}",
            res.len() - 1,
            res[res.len() - 1]
        ),
    )
}

fn maragal_file() -> Option<PathBuf> {
    let dir = PathBuf::from(std::env::var_os("KRYBOUND_DATA_DIR")?);
    ["Maragal_3T.mtx", "Maragal3_T.mtx", "maragal_3T.mtx", "Maragal_3T/Maragal_3T.mtx"]
        .iter()
        .map(|name| dir.join(name))
        .find(|p| p.is_file())
}

fn maragal(path: PathBuf) -> Outcome {
    type D = DoubleDouble;
    let p = load_matrix_market::<D>(&path).expect("readable Matrix Market file");
    if (p.rows(), p.cols()) != (858, 1682) {
        return outcome(false, format!("shape {} x {}, expected 858 x 1682", p.rows(), p.cols()));
    }
    let res = precond_trace(&p.a, &p.b, D::ONE, 1, 1e-25, 600);
    let monotone = res.windows(2).all(|w| w[1] <= w[0]);
    let rel_final = (res[res.len() - 1] / res[0]).to_f64();
    outcome(
        monotone && rel_final <= 1e-20,
        format!("{} iterations, non-increasing {monotone}, final relative {rel_final:.2e}", res.len() - 1),
    )
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let slow = args.iter().any(|a| a == "--include-ignored" || a == "--ignored");
    // `cargo test -- --list` and filters are not meaningful here.
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }

    type Check = fn() -> Outcome;
    let checks: [(usize, &str, Check, u64); 8] = [
        (1, "greenbaum 3x3 reproduction", greenbaum_three_by_three, 1),
        (2, "NR-SOR residuals and bounds (ω=1.1, l=1..5)", table3, 5),
        (3, "stair matrix spectra", stair_spectra, 1),
        (4, "stair I−H⁸ clusters and bound chain", stair_clusters, 30),
        (5, "bound dominates GMRES residual", upper_bound_invariant, 60),
        (6, "NR-SOR sweep equivalence", nrsor_equivalence, 30),
        (7, "cluster bound scales with offsets", cluster_scaling, 5),
        (8, "exp-decay n=201 co-trend", exp_decay_cotrend, 120),
    ];
    let mut failed = 0;
    let mut report = |id: usize, name: &str, out: Outcome, elapsed: Duration, limit: u64| {
        let in_time = elapsed.as_secs_f64() < limit as f64;
        let pass = out.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{} criterion {id}: {name}: {} [{:.2} s, limit {limit} s{}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", exceeded" }
        );
    };
    for (id, name, check, limit) in checks {
        let t0 = Instant::now();
        let out = check();
        report(id, name, out, t0.elapsed(), limit);
    }
    match (slow, maragal_file()) {
        (true, Some(path)) => {
            let t0 = Instant::now();
            let out = maragal(path);
            report(9, "Maragal_3T extended-precision trace", out, t0.elapsed(), u64::MAX);
        }
        (true, None) => println!("SKIP criterion 9: Maragal_3T: no matrix file in KRYBOUND_DATA_DIR"),
        (false, _) => println!("SKIP criterion 9: Maragal_3T: slow, run with --include-ignored"),
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
