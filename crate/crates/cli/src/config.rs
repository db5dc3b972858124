//! Command-line grammar and the validated experiment configuration.

use std::path::PathBuf;

use anyhow::{bail, ensure, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "krybound", version, about = "GMRES / BA-GMRES experiments with eigenvalue-based residual bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated problem as Matrix Market files (`<out>` and `<out stem>.rhs.mtx`).
    Gen {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_enum, default_value_t = Precision::F64)]
        precision: Precision,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve and write one trace row per iteration.
    Solve(RunArgs),
    /// Solve, then add residual bound columns from the eigen-expansion of r₀.
    Bound {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        bound: BoundArgs,
    },
    /// Rerun a published experiment and compare with the published numbers.
    Reproduce {
        /// Targets to run; several run in parallel.
        #[arg(value_enum, required = true)]
        targets: Vec<Target>,
        /// Where to look for Maragal_3T.mtx.
        #[arg(long, env = "KRYBOUND_DATA_DIR")]
        data_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// 100×20 rank-10 stair matrix `U S Vᵀ`.
    Stair,
    /// `diag(1 − e^{−p/4}) Q` with the sine orthogonal matrix `Q`.
    ExpDecay,
    /// 3×3 matrix with residual curve (1, 0.99, 0.98) and eigenvalues {1, 1.01, 1.001}.
    Greenbaum,
    /// As `greenbaum` with the companion constant term rounded to 1.0110.
    GreenbaumRounded,
    /// `n × n` identity with `b = 1/√n`.
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StairRhsArg {
    /// Random unit vector projected onto the range of A.
    Range,
    /// Random unit vector with a component outside the range of A.
    Inconsistent,
    /// A times the vector of ones.
    Ones,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Gmres,
    BaGmres,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    F64,
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundMode {
    Theorem1,
    Cluster,
    FirstOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Target {
    Table1,
    Table2,
    Table3,
    Greenbaum,
    Fig6,
    Fig8,
    Maragal,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Table1 => "table1",
            Target::Table2 => "table2",
            Target::Table3 => "table3",
            Target::Greenbaum => "greenbaum",
            Target::Fig6 => "fig6",
            Target::Fig8 => "fig8",
            Target::Maragal => "maragal",
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct ProblemArgs {
    /// Built-in generator.
    #[arg(long = "gen", value_enum, conflicts_with = "mtx", required_unless_present = "mtx")]
    pub generator: Option<GenKind>,
    /// Matrix Market file; b = A·1 unless --rhs is given.
    #[arg(long)]
    pub mtx: Option<PathBuf>,
    /// Matrix Market m×1 right-hand side for --mtx.
    #[arg(long, requires = "mtx")]
    pub rhs: Option<PathBuf>,
    /// Order for exp-decay (default 201) and identity (default 4).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 438)]
    pub seed: u64,
    /// Right-hand side of the stair problem.
    #[arg(long, value_enum, default_value_t = StairRhsArg::Range)]
    pub stair_rhs: StairRhsArg,
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = Solver::Gmres)]
    pub solver: Solver,
    /// NR-SOR relaxation parameter, in (0, 2).
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// NR-SOR sweeps per preconditioner application.
    #[arg(short = 'l', long = "inner-steps", default_value_t = 1)]
    pub inner_steps: usize,
    #[arg(long, value_enum, default_value_t = Precision::F64)]
    pub precision: Precision,
    /// Relative tolerance of the stopping test.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub maxit: usize,
    /// Stop on ‖Aᵀr_k‖ ≤ tol·‖Aᵀr₀‖ (BA-GMRES).
    #[arg(long)]
    pub stop_on_normal_residual: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Trace file; without it the trace goes to standard output and the
    /// summary to standard error.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum, default_value_t = BoundMode::Theorem1)]
    pub bound_mode: BoundMode,
    /// Cluster radius: eigenvalues closer than 2ε share a center.
    #[arg(long, conflicts_with = "centers")]
    pub cluster_eps: Option<f64>,
    /// Number of centers chosen by greedy k-center clustering.
    #[arg(long)]
    pub centers: Option<usize>,
    /// Last iteration with a bound; defaults to the solver's iteration count.
    #[arg(long)]
    pub kmax: Option<usize>,
}

/// Where the problem comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSource {
    Generator { kind: GenKind, n: usize, seed: u64, stair_rhs: StairRhsArg },
    File { mtx: PathBuf, rhs: Option<PathBuf> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClusterSpec {
    Radius(f64),
    Count(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundConfig {
    pub mode: BoundMode,
    pub cluster: Option<ClusterSpec>,
    pub kmax: Option<usize>,
}

/// Everything needed to run one experiment, checked before any compute.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSource,
    pub solver: Solver,
    pub omega: f64,
    pub inner_steps: usize,
    pub precision: Precision,
    pub tol: f64,
    pub maxit: usize,
    pub stop_on_normal_residual: bool,
    pub bound: Option<BoundConfig>,
}

impl ProblemSource {
    pub fn from_args(p: &ProblemArgs) -> Result<Self> {
        if let Some(mtx) = &p.mtx {
            ensure!(mtx.is_file(), "matrix file {} not found", mtx.display());
            if let Some(rhs) = &p.rhs {
                ensure!(rhs.is_file(), "rhs file {} not found", rhs.display());
            }
            return Ok(Self::File {
                mtx: mtx.clone(),
                rhs: p.rhs.clone(),
            });
        }
        let Some(kind) = p.generator else {
            bail!("one of --gen or --mtx is required");
        };
        let n = match kind {
            GenKind::ExpDecay => p.n.unwrap_or(201),
            GenKind::Identity => p.n.unwrap_or(4),
            GenKind::Stair => {
                ensure!(p.n.is_none_or(|n| n == 20), "the stair matrix is 100 x 20; --n does not apply");
                20
            }
            GenKind::Greenbaum | GenKind::GreenbaumRounded => {
                ensure!(p.n.is_none_or(|n| n == 3), "the greenbaum example is 3 x 3; --n does not apply");
                3
            }
        };
        ensure!(
            !(kind == GenKind::ExpDecay && n < 2),
            "exp-decay needs --n of at least 2"
        );
        ensure!(n >= 1, "--n must be at least 1");
        Ok(Self::Generator {
            kind,
            n,
            seed: p.seed,
            stair_rhs: p.stair_rhs,
        })
    }
}

impl ExperimentConfig {
    pub fn from_args(run: &RunArgs, bound: Option<&BoundArgs>) -> Result<Self> {
        let problem = ProblemSource::from_args(&run.problem)?;
        ensure!(
            run.omega > 0.0 && run.omega < 2.0,
            "--omega must lie in (0, 2), got {}",
            run.omega
        );
        ensure!(run.inner_steps >= 1, "--inner-steps must be at least 1");
        ensure!(run.maxit >= 1, "--maxit must be at least 1");
        let tol = run.tol.unwrap_or(match run.precision {
            Precision::F64 => 1e-12,
            Precision::Extended => 1e-28,
        });
        ensure!(tol > 0.0 && tol < 1.0, "--tol must lie in (0, 1), got {tol}");
        if let ProblemSource::Generator { kind: GenKind::Stair, .. } = problem {
            ensure!(
                run.solver == Solver::BaGmres,
                "the stair matrix is rectangular; use --solver ba-gmres"
            );
        }
        let bound = bound.map(BoundConfig::from_args).transpose()?;
        Ok(Self {
            problem,
            solver: run.solver,
            omega: run.omega,
            inner_steps: run.inner_steps,
            precision: run.precision,
            tol,
            maxit: run.maxit,
            stop_on_normal_residual: run.stop_on_normal_residual,
            bound,
        })
    }
}

impl BoundConfig {
    pub fn from_args(b: &BoundArgs) -> Result<Self> {
        let cluster = match (b.cluster_eps, b.centers) {
            (Some(eps), _) => {
                ensure!(eps > 0.0 && eps.is_finite(), "--cluster-eps must be positive, got {eps}");
                Some(ClusterSpec::Radius(eps))
            }
            (None, Some(s)) => {
                ensure!(s >= 1, "--centers must be at least 1");
                Some(ClusterSpec::Count(s))
            }
            (None, None) => None,
        };
        if b.bound_mode != BoundMode::Theorem1 && cluster.is_none() {
            bail!("--bound-mode cluster and first-order need --cluster-eps or --centers");
        }
        Ok(Self {
            mode: b.bound_mode,
            cluster,
            kmax: b.kmax,
        })
    }
}
