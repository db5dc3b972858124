//! Problem loading, solves and bound columns for `gen`, `solve` and `bound`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use clap::ValueEnum;
use krybound_core::bounds::{
    bound_curve, cluster_assign, cluster_poly_bound, decompose_rhs, first_order_estimate, ClusterMode,
};
use krybound_core::generators::{
    exp_decay_matrix, load_matrix_market, load_matrix_market_with_rhs, stair_matrix_with,
    three_by_three_example, three_by_three_rounded_example, write_matrix_market_array, ProblemInstance,
    ProblemMetadata, StairRhs,
};
use krybound_core::gmres::{gmres, ConvergenceTrace, GmresOptions, OperatorHandle, Termination};
use krybound_core::linalg::{Matrix, DEFAULT_EIG_CAP};
use krybound_core::nrsor::{nrsor_apply, nrsor_ba_gmres, preconditioned_matrix, NrsorConfig};
use krybound_core::{DoubleDouble, Real};

use crate::config::{
    BoundConfig, BoundMode, ClusterSpec, ExperimentConfig, GenKind, Precision, ProblemSource, Solver, StairRhsArg,
};
use crate::trace::{Trace, TraceRow, TraceValue};

/// Result of `solve` or `bound`.
#[derive(Debug)]
pub struct RunOutcome {
    pub trace: Trace,
    pub termination: Termination,
    pub summary: String,
}

impl RunOutcome {
    /// 0 when the solver stopped on its tolerance, 2 on the iteration limit.
    pub fn exit_code(&self) -> i32 {
        match self.termination {
            Termination::MaxIterations => 2,
            _ => 0,
        }
    }
}

pub fn load_problem<T: Real>(src: &ProblemSource) -> Result<ProblemInstance<T>> {
    let p = match src {
        ProblemSource::File { mtx, rhs: None } => {
            load_matrix_market(mtx).with_context(|| format!("reading {}", mtx.display()))?
        }
        ProblemSource::File { mtx, rhs: Some(rhs) } => load_matrix_market_with_rhs(mtx, rhs)
            .with_context(|| format!("reading {} with rhs {}", mtx.display(), rhs.display()))?,
        &ProblemSource::Generator { kind, n, seed, stair_rhs } => match kind {
            GenKind::Stair => {
                let rhs = match stair_rhs {
                    StairRhsArg::Range => StairRhs::RangeProjected,
                    StairRhsArg::Inconsistent => StairRhs::Inconsistent,
                    StairRhsArg::Ones => StairRhs::OnesImage,
                };
                stair_matrix_with(seed, rhs)
            }
            GenKind::ExpDecay => exp_decay_matrix(n, seed)?,
            GenKind::Greenbaum => three_by_three_example(),
            GenKind::GreenbaumRounded => three_by_three_rounded_example(),
            GenKind::Identity => {
                let v = T::one() / T::from_usize(n).sqrt();
                let metadata = ProblemMetadata {
                    name: "identity".into(),
                    parameters: vec![("n".into(), n.to_string())],
                    consistent: true,
                    ..Default::default()
                };
                ProblemInstance::new(Matrix::identity(n), vec![v; n], metadata)?
            }
        },
    };
    Ok(p)
}

/// `rhs.mtx` next to `out`: `dir/name.mtx` → `dir/name.rhs.mtx`.
pub fn rhs_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "problem".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.rhs.mtx"))
}

/// Writes `A` to `out` and `b` to [`rhs_path`]; returns a summary line.
pub fn generate(src: &ProblemSource, precision: Precision, out: &Path) -> Result<String> {
    match precision {
        Precision::F64 => generate_typed::<f64>(src, out),
        Precision::Extended => generate_typed::<DoubleDouble>(src, out),
    }
}

fn generate_typed<T: Real>(src: &ProblemSource, out: &Path) -> Result<String> {
    let p = load_problem::<T>(src)?;
    let rhs = rhs_path(out);
    let write = |path: &Path, m: &Matrix<T>| -> Result<()> {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_matrix_market_array(BufWriter::new(f), m)?;
        Ok(())
    };
    write(out, &p.a)?;
    write(&rhs, &Matrix::from_columns(&[p.b.clone()]))?;
    Ok(format!(
        "wrote {} x {} {} matrix to {} and rhs to {}",
        p.rows(),
        p.cols(),
        p.metadata.name,
        out.display(),
        rhs.display()
    ))
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    match cfg.precision {
        Precision::F64 => run_typed::<f64>(cfg),
        Precision::Extended => run_typed::<DoubleDouble>(cfg),
    }
}

/// `‖x‖₂` as `f64`.
pub fn norm<T: Real>(x: &[T]) -> f64 {
    krybound_core::linalg::norm2(x).to_f64()
}

fn value<T: Real>(x: T) -> Result<Option<TraceValue>> {
    TraceValue::from_real(x).map(Some)
}

fn solve<T: Real>(cfg: &ExperimentConfig, p: &ProblemInstance<T>) -> Result<ConvergenceTrace<T>> {
    let opts = GmresOptions {
        rtol: cfg.tol,
        max_iterations: cfg.maxit,
        stop_on_normal_residual: cfg.stop_on_normal_residual,
        ..GmresOptions::for_precision::<T>()
    };
    match cfg.solver {
        Solver::Gmres => {
            ensure!(
                p.a.is_square(),
                "GMRES needs a square matrix, got {} x {}; use --solver ba-gmres",
                p.rows(),
                p.cols()
            );
            Ok(gmres(&OperatorHandle::from_matrix(&p.a), &p.b, None, &opts)?)
        }
        Solver::BaGmres => {
            let nr = NrsorConfig::new(&p.a, T::from_f64(cfg.omega), cfg.inner_steps)?;
            Ok(nrsor_ba_gmres(&p.a, &nr, &p.b, None, &opts)?)
        }
    }
}

fn metadata<T: Real>(cfg: &ExperimentConfig, p: &ProblemInstance<T>) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("problem".into(), p.metadata.name.clone());
    if let Some(seed) = p.metadata.seed {
        m.insert("seed".into(), seed.to_string());
    }
    if let ProblemSource::File { mtx, .. } = &cfg.problem {
        m.insert("mtx".into(), mtx.display().to_string());
    }
    m.insert("rows".into(), p.rows().to_string());
    m.insert("cols".into(), p.cols().to_string());
    m.insert("precision".into(), T::NAME.into());
    m.insert(
        "solver".into(),
        match cfg.solver {
            Solver::Gmres => "gmres",
            Solver::BaGmres => "ba-gmres",
        }
        .into(),
    );
    if cfg.solver == Solver::BaGmres {
        m.insert("omega".into(), cfg.omega.to_string());
        m.insert("inner_steps".into(), cfg.inner_steps.to_string());
    }
    m.insert("tol".into(), format!("{:e}", cfg.tol));
    m.insert("maxit".into(), cfg.maxit.to_string());
    m
}

fn run_typed<T: Real>(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let p = load_problem::<T>(&cfg.problem)?;
    if cfg.bound.is_some() {
        let order = if cfg.solver == Solver::Gmres { p.rows() } else { p.cols() };
        ensure!(
            order <= DEFAULT_EIG_CAP,
            "the operator has order {order}, above the eigensolver cap {DEFAULT_EIG_CAP}; lower --n or drop the bound"
        );
    }
    let t0 = Instant::now();
    let ct = solve(cfg, &p)?;
    let solve_time = t0.elapsed();

    let mut rows: Vec<TraceRow> = Vec::with_capacity(ct.records.len());
    for r in &ct.records {
        rows.push(TraceRow {
            k: r.k,
            residual_norm: value(r.residual_norm)?,
            preconditioned_residual_norm: match cfg.solver {
                Solver::BaGmres => value(r.precond_residual_norm)?,
                Solver::Gmres => None,
            },
            normal_residual_norm: r.normal_residual_norm.map(TraceValue::from_real).transpose()?,
            ..Default::default()
        });
    }
    let mut meta = metadata(cfg, &p);
    meta.insert("termination".into(), ct.termination.as_str().into());
    meta.insert("iterations".into(), ct.iterations.to_string());

    let mut bound_note = String::new();
    if let Some(bc) = &cfg.bound {
        let kmax = bc.kmax.unwrap_or(ct.iterations).max(1);
        add_bounds(cfg, bc, &p, kmax, &mut rows, &mut meta)?;
        if let Some(b) = rows.get(kmax).and_then(|r| r.bound_theorem1.as_ref()) {
            bound_note = format!(", bound at k={kmax} {:.4e}", b.to_f64());
        }
    }

    let last = ct.last();
    let mut summary = format!(
        "{} after {} iterations: residual {:.4e}",
        ct.termination.as_str(),
        ct.iterations,
        last.residual_norm.to_f64()
    );
    if cfg.solver == Solver::BaGmres {
        summary.push_str(&format!(", preconditioned {:.4e}", last.precond_residual_norm.to_f64()));
    }
    if let Some(nr) = last.normal_residual_norm {
        summary.push_str(&format!(", normal {:.4e}", nr.to_f64()));
    }
    summary.push_str(&bound_note);
    summary.push_str(&format!(
        "; solve {:.3} s, total {:.3} s",
        solve_time.as_secs_f64(),
        t0.elapsed().as_secs_f64()
    ));
    let trace = Trace { metadata: meta, rows };
    trace.validate()?;
    Ok(RunOutcome {
        trace,
        termination: ct.termination,
        summary,
    })
}

fn add_bounds<T: Real>(
    cfg: &ExperimentConfig,
    bc: &BoundConfig,
    p: &ProblemInstance<T>,
    kmax: usize,
    rows: &mut Vec<TraceRow>,
    meta: &mut BTreeMap<String, String>,
) -> Result<()> {
    let (op, r0) = match cfg.solver {
        Solver::Gmres => (p.a.clone(), p.b.clone()),
        Solver::BaGmres => {
            let omega = T::from_f64(cfg.omega);
            let nr = NrsorConfig::new(&p.a, omega, cfg.inner_steps)?;
            (preconditioned_matrix(&p.a, omega, cfg.inner_steps)?, nrsor_apply(&p.a, &nr, &p.b)?)
        }
    };
    let e = decompose_rhs(&op, &r0).context("eigen-expansion of the initial residual")?;
    let series = bound_curve(&e, kmax)?;
    let mode_name = bc.mode.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    meta.insert("bound_mode".into(), mode_name);
    meta.insert("eigenpairs".into(), e.d().to_string());
    meta.insert("bound_prefactor".into(), series.prefactor.to_f64().to_string());

    while rows.len() <= kmax {
        rows.push(TraceRow {
            k: rows.len(),
            ..Default::default()
        });
    }
    for (k, b) in series.by_iteration(e.r0_norm).into_iter().enumerate() {
        rows[k].bound_theorem1 = value(b)?;
    }
    if bc.mode == BoundMode::Theorem1 {
        return Ok(());
    }
    let mode = match bc.cluster.as_ref().expect("validated with the bound mode") {
        ClusterSpec::Radius(eps) => ClusterMode::Radius(*eps),
        ClusterSpec::Count(s) => ClusterMode::Count(*s),
    };
    let ca = cluster_assign(&e.lambdas, &mode)?;
    meta.insert("clusters".into(), ca.s().to_string());
    meta.insert("cluster_epsilon".into(), ca.epsilon.to_f64().to_string());
    for k in 1..=kmax {
        // Degrees below the number of centers have no cluster polynomial.
        if let Ok(b) = cluster_poly_bound(&e, &ca, k) {
            rows[k].bound_cluster = value(T::from_extended(b))?;
        }
        if bc.mode == BoundMode::FirstOrder {
            if let Ok(b) = first_order_estimate(&e, &ca, k) {
                rows[k].estimate_first_order = value(T::from_extended(b))?;
            }
        }
    }
    Ok(())
}
