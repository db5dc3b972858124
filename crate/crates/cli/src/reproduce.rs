//! Published tables and figures rerun with their canonical settings.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use krybound_core::bounds::{
    bound_curve, cluster_assign, cluster_poly_bound, decompose_rhs, first_order_estimate, kendall_tau,
    log_decrements, log_second_differences, vandermonde_min, weighted_norm, ClusterMode, EigenData,
};
use krybound_core::generators::{
    exp_decay_matrix, load_matrix_market, stair_matrix, three_by_three_example, three_by_three_rounded_example,
    PrescribedCurve,
};
use krybound_core::gmres::{gmres, GmresOptions, OperatorHandle};
use krybound_core::linalg::{eig_nonsymmetric, jacobi_svd, Matrix};
use krybound_core::nrsor::{nrsor_apply, nrsor_ba_gmres, preconditioned_matrix, NrsorConfig};
use krybound_core::{Complex, DoubleDouble, Real};

use crate::config::Target;

/// Seed of the stair problem used for the seed-dependent rows.
pub const STAIR_SEED: u64 = 438;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Seed-dependent value shown for comparison only.
    Structural,
    Skipped,
}

impl Status {
    fn check(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Structural => "structural",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub label: String,
    pub published: String,
    pub computed: String,
    pub tolerance: String,
    pub status: Status,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub target: Target,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

impl Report {
    fn new(target: Target) -> Self {
        Self {
            target,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn row(&mut self, label: impl Into<String>, published: impl Into<String>, computed: impl Into<String>, tolerance: impl Into<String>, status: Status) {
        self.rows.push(Row {
            label: label.into(),
            published: published.into(),
            computed: computed.into(),
            tolerance: tolerance.into(),
            status,
        });
    }

    /// Relative comparison `|x − want| ≤ tol·|want|`.
    fn rel(&mut self, label: impl Into<String>, want: f64, got: f64, tol: f64) {
        let ok = (got - want).abs() <= tol * want.abs();
        self.row(label, format!("{want:.4e}"), format!("{got:.4e}"), format!("{tol:.0e} rel"), Status::check(ok));
    }

    /// Absolute comparison `|x − want| ≤ tol`.
    fn abs(&mut self, label: impl Into<String>, want: f64, got: f64, tol: f64, digits: usize) {
        let ok = (got - want).abs() <= tol;
        self.row(
            label,
            format!("{want:.digits$}"),
            format!("{got:.prec$}", prec = digits + 2),
            format!("{tol:.0e} abs"),
            Status::check(ok),
        );
    }

    fn structural(&mut self, label: impl Into<String>, published: impl Into<String>, computed: impl Into<String>) {
        self.row(label, published, computed, "-", Status::Structural);
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Fail).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ==", self.target.name())?;
        let header = ["", "published", "computed", "tolerance", "status"];
        let mut widths = header.map(str::len);
        for r in &self.rows {
            for (w, cell) in widths.iter_mut().zip([&r.label, &r.published, &r.computed, &r.tolerance]) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |f: &mut fmt::Formatter<'_>, cells: [&str; 5]| -> fmt::Result {
            for (i, cell) in cells.iter().enumerate() {
                let pad = widths[i].saturating_sub(cell.chars().count());
                write!(f, "{}{}{}", cell, " ".repeat(pad), if i < 4 { " | " } else { "\n" })?;
            }
            Ok(())
        };
        line(f, header)?;
        for r in &self.rows {
            let status = r.status.to_string();
            line(f, [&r.label, &r.published, &r.computed, &r.tolerance, &status])?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

pub fn run_target(target: Target, data_dir: Option<&Path>) -> Result<Report> {
    match target {
        Target::Table1 => table1(),
        Target::Table2 => table2(),
        Target::Table3 => table3(),
        Target::Greenbaum => greenbaum(),
        Target::Fig6 => fig6(),
        Target::Fig8 => fig8(),
        Target::Maragal => maragal(data_dir),
    }
    .with_context(|| format!("reproduce {}", target.name()))
}

/// Runs the targets on separate threads and returns reports in input order.
pub fn run_targets(targets: &[Target], data_dir: Option<&Path>) -> Vec<Result<Report>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = targets
            .iter()
            .map(|&t| scope.spawn(move || run_target(t, data_dir)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(anyhow::anyhow!("worker thread panicked"))))
            .collect()
    })
}

fn precond_trace<T: Real>(a: &Matrix<T>, b: &[T], omega: T, l: usize, rtol: f64, maxit: usize) -> Result<Vec<T>> {
    let cfg = NrsorConfig::new(a, omega, l)?;
    let opts = GmresOptions {
        rtol,
        max_iterations: maxit,
        ..GmresOptions::for_precision::<T>()
    };
    Ok(nrsor_ba_gmres(a, &cfg, b, None, &opts)?
        .records
        .iter()
        .map(|r| r.precond_residual_norm)
        .collect())
}

fn preconditioned_expansion<T: Real>(a: &Matrix<T>, b: &[T], omega: T, l: usize) -> Result<EigenData<T>> {
    let m = preconditioned_matrix(a, omega, l)?;
    let cfg = NrsorConfig::new(a, omega, l)?;
    let r0 = nrsor_apply(a, &cfg, b)?;
    Ok(decompose_rhs(&m, &r0)?)
}

fn complex_2dp(z: Complex<f64>) -> String {
    match z.im {
        im if im == 0.0 => format!("{:.2}", z.re),
        im if im.abs() < 5e-3 => format!("{:.2}{}{:.2e}i", z.re, if im < 0.0 { "-" } else { "+" }, im.abs()),
        im => format!("{:.2}{}{:.2}i", z.re, if im < 0.0 { "-" } else { "+" }, im.abs()),
    }
}

fn to_f64(z: &Complex<DoubleDouble>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

fn table1() -> Result<Report> {
    let mut rep = Report::new(Target::Table1);
    let p = stair_matrix::<f64>(STAIR_SEED);
    let sv = jacobi_svd(&p.a).singular_values;
    let published_a = [1.41, 1.27, 1.31, 0.99, 0.85, 0.71, 0.57, 0.42, 0.28, 0.14];
    for (i, &want) in published_a.iter().enumerate() {
        rep.abs(format!("σ{} of A", i + 1), want, sv[i], 5e-3, 2);
    }
    let ata = p.a.transpose().matmul(&p.a)?;
    let mut eigs: Vec<f64> = eig_nonsymmetric(&ata)?.eigenvalues.iter().map(|z| z.re).collect();
    eigs.sort_by(|a, b| b.total_cmp(a));
    let published_ata = [2.00, 1.62, 1.28, 0.98, 0.72, 0.50, 0.32, 0.18, 0.08, 0.02];
    for (i, &want) in published_ata.iter().enumerate() {
        rep.abs(format!("λ{} of AᵀA", i + 1), want, eigs[i], 1e-2, 2);
    }

    // H and I − H^l depend on the random factors U and V.
    let pd = stair_matrix::<DoubleDouble>(STAIR_SEED);
    let one = DoubleDouble::ONE;
    let m1 = preconditioned_matrix(&pd.a, one, 1)?;
    let h = Matrix::<DoubleDouble>::identity(m1.rows()).sub(&m1);
    let mut h_eigs: Vec<Complex<f64>> = eig_nonsymmetric(&h)?
        .eigenvalues
        .iter()
        .map(to_f64)
        .filter(|z| (z.re - 1.0).hypot(z.im) > 1e-8)
        .collect();
    h_eigs.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(b.im.total_cmp(&a.im)));
    let published_h = ["0.00", "0.00", "0.00", "0.01", "0.05", "0.08+0.12i", "0.08-0.12i", "0.32", "0.71", "0.91"];
    for (i, want) in published_h.iter().enumerate() {
        let got = h_eigs.get(i).map_or("-".into(), |&z| complex_2dp(z));
        rep.structural(format!("H eigenvalue {}", i + 1), *want, got);
    }
    let published_l = [
        (4, ["1.00", "1.00", "1.00", "1.00", "1.00", "1.00+2.98e-4i", "1.00-2.98e-4i", "0.99", "0.74", "0.30"]),
        (8, ["1.00", "1.00", "1.00", "1.00", "1.00", "1.00+1.90e-7i", "1.00-1.90e-7i", "1.00", "0.93", "0.51"]),
    ];
    for (l, published) in published_l {
        let m = preconditioned_matrix(&pd.a, one, l)?;
        let mut eigs: Vec<Complex<f64>> = eig_nonsymmetric(&m)?
            .eigenvalues
            .iter()
            .map(to_f64)
            .filter(|z| z.abs() > 1e-8)
            .collect();
        eigs.sort_by(|a, b| {
            let da = (a.re - 1.0).hypot(a.im);
            let db = (b.re - 1.0).hypot(b.im);
            da.total_cmp(&db).then(b.im.total_cmp(&a.im))
        });
        for (i, want) in published.iter().enumerate() {
            let got = eigs.get(i).map_or("-".into(), |&z| complex_2dp(z));
            rep.structural(format!("I−H^{l} eigenvalue {}", i + 1), *want, got);
        }
    }
    rep.notes.push(format!(
        "stair seed {STAIR_SEED}; the printed σ3 = 1.31 contradicts the construction (√2·0.8 = 1.13), so that row fails"
    ));
    Ok(rep)
}

fn table2() -> Result<Report> {
    let mut rep = Report::new(Target::Table2);
    let p = stair_matrix::<DoubleDouble>(STAIR_SEED);
    let e = preconditioned_expansion(&p.a, &p.b, DoubleDouble::ONE, 8)?;
    let dist = |z: &Complex<DoubleDouble>| (z.re - DoubleDouble::ONE).hypot(z.im).to_f64();
    let mut order: Vec<usize> = (0..e.d()).collect();
    order.sort_by(|&i, &j| dist(&e.lambdas[i]).total_cmp(&dist(&e.lambdas[j])));
    let published = [
        "1+8.00e-15", "1+3.11e-15", "1+2.44e-15", "1+5.86e-11", "1", "1.00+1.90e-7i", "1.00-1.90e-7i", "0.9999",
        "0.9325", "0.5099",
    ];
    for (i, want) in published.iter().enumerate() {
        let got = order.get(i).map_or("-".into(), |&j| {
            let z = e.lambdas[j];
            let off = z.re - DoubleDouble::ONE;
            if z.im.to_f64().abs() > 0.0 {
                complex_2dp(to_f64(&z))
            } else if off.to_f64().abs() < 1e-6 {
                format!("1{}{:.2e}", if off.to_f64() < 0.0 { "-" } else { "+" }, off.to_f64().abs())
            } else {
                format!("{:.4}", z.re.to_f64())
            }
        });
        rep.structural(format!("λ{}", i + 1), *want, got);
    }
    let real_offsets: Vec<f64> = e
        .lambdas
        .iter()
        .filter(|z| z.im.to_f64() == 0.0)
        .map(dist)
        .collect();
    let tiny = real_offsets.iter().filter(|&&d| d > 1e-25 && d < 1e-10).count();
    let exact = real_offsets.iter().filter(|&&d| d <= 1e-25).count();
    let pair = e
        .lambdas
        .iter()
        .filter(|z| z.im.to_f64() != 0.0)
        .map(dist)
        .fold(f64::INFINITY, f64::min);
    rep.structural("real offsets in (1e-25, 1e-10)", "4", tiny.to_string());
    rep.structural("eigenvalues equal to 1 (|ε| ≤ 1e-25)", "1", exact.to_string());
    rep.structural("complex pair distance from 1", "1.90e-7", format!("{pair:.2e}"));
    let all: Vec<Complex<f64>> = eig_nonsymmetric(&preconditioned_matrix(&p.a, DoubleDouble::ONE, 8)?)?
        .eigenvalues
        .iter()
        .map(to_f64)
        .collect();
    let near = all.iter().filter(|z| (z.re - 1.0).hypot(z.im) <= 1e-6).count();
    let shape = near >= 5
        && all.iter().any(|z| (z.re - 0.9999).abs() <= 1e-3 && z.im.abs() <= 1e-3 && (z.re - 1.0).hypot(z.im) > 1e-6)
        && all.iter().any(|z| z.im == 0.0 && (0.85..=0.98).contains(&z.re))
        && all.iter().any(|z| z.im == 0.0 && (0.3..=0.7).contains(&z.re));
    rep.row(
        "≥5 within 1e-6 of 1, one at 0.9999, one in [0.85,0.98], one in [0.3,0.7]",
        "yes",
        format!("{near} within 1e-6"),
        "-",
        Status::check(shape),
    );
    rep.notes.push(format!("stair seed {STAIR_SEED}, ω = 1, l = 8, double-double"));
    Ok(rep)
}

pub const TABLE3_ACTUAL: [[f64; 2]; 5] = [
    [7.0265e-1, 6.8492e-1],
    [8.7823e-1, 8.7720e-1],
    [8.8667e-1, 1.4074e-1],
    [8.7730e-1, 2.1902e-2],
    [8.6351e-1, 4.1286e-3],
];
pub const TABLE3_BOUND: [[f64; 2]; 5] = [
    [4.2212, 3.9239],
    [4.0204, 2.3155],
    [3.8964, 4.7470e-1],
    [3.7759, 8.7574e-2],
    [3.6570, 1.7079e-2],
];

fn table3() -> Result<Report> {
    let mut rep = Report::new(Target::Table3);
    let p = three_by_three_example::<f64>();
    for l in 1..=5 {
        let trace = precond_trace(&p.a, &p.b, 1.1, l, 1e-15, 2)?;
        let e = preconditioned_expansion(&p.a, &p.b, 1.1, l)?;
        let bounds = bound_curve(&e, 2)?;
        for k in 1..=2 {
            let actual = trace.get(k).copied().unwrap_or(0.0);
            rep.rel(format!("l={l} k={k} actual"), TABLE3_ACTUAL[l - 1][k - 1], actual, 1e-3);
            rep.rel(format!("l={l} k={k} bound"), TABLE3_BOUND[l - 1][k - 1], bounds.records[k - 1].bound.to_f64(), 1e-3);
        }
    }
    rep.notes.push("BA-GMRES with NR-SOR, ω = 1.1, on the 3×3 example with b = g".into());
    Ok(rep)
}

fn greenbaum() -> Result<Report> {
    let mut rep = Report::new(Target::Greenbaum);
    let curve = PrescribedCurve::from_f64(
        &[1.0, 0.99, 0.98],
        &[Complex::new(1.0, 0.0), Complex::new(1.01, 0.0), Complex::new(1.001, 0.0)],
    )?;
    for (i, (g, want)) in curve.g().iter().zip([0.1411, 0.1404, 0.98]).enumerate() {
        rep.abs(format!("g{}", i + 1), want, g.to_f64(), 1e-4, 4);
    }
    let p = three_by_three_example::<f64>();
    let opts = GmresOptions {
        rtol: 1e-14,
        max_iterations: 3,
        ..GmresOptions::default()
    };
    let t = gmres(&OperatorHandle::from_matrix(&p.a), &p.b, None, &opts)?;
    for (r, want) in t.records.iter().zip([1.0, 0.99, 0.98, 0.0]) {
        rep.abs(format!("‖r{}‖", r.k), want, r.residual_norm, 1e-6, 2);
    }
    let q = three_by_three_rounded_example::<f64>();
    let e = decompose_rhs(&q.a, &q.b)?;
    let bounds = bound_curve(&e, 2)?;
    rep.rel("Vandermonde part k=1", 3.7103e-2, vandermonde_min(&e.lambdas, 1)?.0.to_f64(), 0.05);
    rep.rel("Vandermonde part k=2", 7.9480e-4, vandermonde_min(&e.lambdas, 2)?.0.to_f64(), 0.05);
    rep.rel("bound k=1", 1.1120e2, bounds.records[0].bound.to_f64(), 0.05);
    rep.rel("bound k=2", 2.3822, bounds.records[1].bound.to_f64(), 0.05);
    rep.rel("κ(V_d)", 8.3057e3, e.condition_number(), 0.01);
    rep.rel("‖V_d diag(c)‖", 2.9972e3, weighted_norm(&e), 0.01);
    rep.notes.push(
        "g and residuals use the exact eigenvalues; the bound rows use the matrix rebuilt from the printed companion (constant 1.0110)"
            .into(),
    );
    Ok(rep)
}

fn fig6() -> Result<Report> {
    let mut rep = Report::new(Target::Fig6);
    let p = stair_matrix::<DoubleDouble>(STAIR_SEED);
    let one = DoubleDouble::ONE;
    let trace = precond_trace(&p.a, &p.b, one, 8, 1e-30, 8)?;
    for (k, r) in trace.iter().enumerate() {
        let published = match k {
            4 => "≈1e-12",
            6 => "≈1e-29",
            _ => "-",
        };
        rep.structural(format!("‖B r{k}‖"), published, format!("{:.3e}", r.to_f64()));
    }
    rep.structural("‖r0‖", "4.55", format!("{:.3} (unit b)", crate::experiment::norm(&p.b)));
    let at = |k: usize| trace.get(k).map_or(f64::INFINITY, |x| x.to_f64());
    rep.row("‖B r4‖ ≤ 1e-10", "≈1e-12", format!("{:.3e}", at(4)), "1e-10", Status::check(at(4) <= 1e-10));
    rep.row("‖B r6‖ ≤ 1e-24", "≈1e-29", format!("{:.3e}", at(6)), "1e-24", Status::check(at(6) <= 1e-24));

    let e = preconditioned_expansion(&p.a, &p.b, one, 8)?;
    let ca = cluster_assign(&e.lambdas, &ClusterMode::Count(6))?;
    let chain = cluster_poly_bound(&e, &ca, 6)?.to_f64();
    let first = first_order_estimate(&e, &ca, 6)?.to_f64();
    rep.row("cluster bound k=6 ≤ 1e-26", "3.49e-29", format!("{chain:.3e}"), "1e-26", Status::check(chain <= 1e-26));
    rep.structural("first-order estimate k=6", "3.49e-29", format!("{first:.3e}"));
    rep.structural("cluster radius ε", "<1e-10", format!("{:.3e}", ca.epsilon.to_f64()));
    rep.structural("‖V_d diag(c)‖", "2.5068", format!("{:.4}", weighted_norm(&e).to_f64()));
    rep.notes.push(format!(
        "stair seed {STAIR_SEED}, ω = 1, l = 8, double-double; six centers by k-center clustering"
    ));
    Ok(rep)
}

fn fig8() -> Result<Report> {
    let mut rep = Report::new(Target::Fig8);
    type D = DoubleDouble;
    let p = exp_decay_matrix::<D>(201, 0)?;
    let res: Vec<f64> = precond_trace(&p.a, &p.b, D::ONE, 1, 1e-14, 200)?.iter().map(|x| x.to_f64()).collect();
    let e = preconditioned_expansion(&p.a, &p.b, D::ONE, 1)?;
    let bnd: Vec<f64> = bound_curve(&e, res.len() - 1)?
        .by_iteration(e.r0_norm)
        .iter()
        .map(|x| x.to_f64())
        .collect();
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
    rep.structural("iterations", "≪ n", (res.len() - 1).to_string());
    rep.structural("final preconditioned residual", "-", format!("{:.3e}", res[res.len() - 1]));
    rep.row("Kendall τ of log-decrements", "same tendency", format!("{tau:.3}"), "> 0.6", Status::check(tau > 0.6));
    rep.row(
        "residual curvature, final third",
        "superlinear",
        format!("{bend_res:.3}"),
        "< 0",
        Status::check(bend_res < 0.0),
    );
    rep.row(
        "bound curvature, final third",
        "superlinear",
        format!("{bend_bnd:.3}"),
        "< 0",
        Status::check(bend_bnd < 0.0),
    );
    rep.notes.push(
        "n = 201 instead of 1001 (eigensolver cost); ω = 1, l = 1, double-double; the n = 1001 condition number 9.18e17 is not reproduced"
            .into(),
    );
    Ok(rep)
}

/// Looks for the Maragal_3T matrix under its common file names.
pub fn find_maragal(dir: &Path) -> Option<PathBuf> {
    ["Maragal_3T.mtx", "Maragal3_T.mtx", "maragal_3T.mtx", "Maragal_3T/Maragal_3T.mtx"]
        .iter()
        .map(|name| dir.join(name))
        .find(|p| p.is_file())
}

fn maragal(data_dir: Option<&Path>) -> Result<Report> {
    let mut rep = Report::new(Target::Maragal);
    let Some(path) = data_dir.and_then(find_maragal) else {
        rep.row("Maragal_3T", "858 x 1682", "-", "-", Status::Skipped);
        rep.notes.push("no Maragal_3T.mtx found; set KRYBOUND_DATA_DIR or pass --data-dir".into());
        return Ok(rep);
    };
    type D = DoubleDouble;
    let p = load_matrix_market::<D>(&path)?;
    let shape_ok = (p.rows(), p.cols()) == (858, 1682);
    rep.row("shape", "858 x 1682", format!("{} x {}", p.rows(), p.cols()), "exact", Status::check(shape_ok));
    let res = precond_trace(&p.a, &p.b, D::ONE, 1, 1e-25, 600)?;
    let monotone = res.windows(2).all(|w| w[1] <= w[0]);
    let rel = (res[res.len() - 1] / res[0]).to_f64();
    rep.row("trace non-increasing", "yes", monotone.to_string(), "-", Status::check(monotone));
    rep.row("final relative ‖B r‖", "≈1e-32", format!("{rel:.3e}"), "1e-20", Status::check(rel <= 1e-20));
    rep.structural("iterations", "-", (res.len() - 1).to_string());
    rep.notes.push(format!(
        "{}; ω = 1, l = 1, b = A·1, double-double; the bound is not computed (order 1682 exceeds the eigensolver cap)",
        path.display()
    ));
    Ok(rep)
}
