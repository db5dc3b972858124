//! Command-line front end for the krybound solvers and bounds.

pub mod config;
pub mod experiment;
pub mod reproduce;
pub mod trace;

use std::fs::File;
use std::io::{BufWriter, Write};

use anyhow::{Context, Result};

use config::{Cli, Command, ExperimentConfig, Format, ProblemSource};

/// Runs one command and returns the process exit code.
pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen { problem, precision, out } => {
            let src = ProblemSource::from_args(&problem)?;
            println!("{}", experiment::generate(&src, precision, &out)?);
            Ok(0)
        }
        Command::Solve(run) => {
            let cfg = ExperimentConfig::from_args(&run, None)?;
            emit(&cfg, run.format, run.out.as_deref())
        }
        Command::Bound { run, bound } => {
            let cfg = ExperimentConfig::from_args(&run, Some(&bound))?;
            emit(&cfg, run.format, run.out.as_deref())
        }
        Command::Reproduce { mut targets, data_dir } => {
            targets.sort();
            targets.dedup();
            let mut failures = 0;
            for (target, report) in targets.iter().zip(reproduce::run_targets(&targets, data_dir.as_deref())) {
                let report = report.with_context(|| format!("target {}", target.name()))?;
                failures += report.failures();
                print!("{report}");
            }
            println!(
                "{} target(s), {failures} failing row(s)",
                targets.len()
            );
            Ok(if failures == 0 { 0 } else { 2 })
        }
    }
}

fn emit(cfg: &ExperimentConfig, format: Format, out: Option<&std::path::Path>) -> Result<i32> {
    let outcome = experiment::run(cfg)?;
    let write = |w: &mut dyn Write| -> Result<()> {
        match format {
            Format::Csv => outcome.trace.write_csv(w),
            Format::Json => outcome.trace.write_json(w),
        }
    };
    match out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(f);
            write(&mut w)?;
            w.flush()?;
            println!("{}; trace written to {}", outcome.summary, path.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            eprintln!("{}", outcome.summary);
        }
    }
    Ok(outcome.exit_code())
}
