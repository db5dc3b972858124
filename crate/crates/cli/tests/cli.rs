use std::fs;
use std::process::{Command, Output};

use krybound_cli::trace::Trace;
use tempfile::tempdir;

fn krybound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krybound"))
        .args(args)
        .env_remove("KRYBOUND_DATA_DIR")
        .output()
        .expect("spawn krybound")
}

fn column(t: &Trace, f: impl Fn(&krybound_cli::trace::TraceRow) -> Option<f64>) -> Vec<f64> {
    t.rows.iter().map(|r| f(r).expect("missing cell")).collect()
}

#[test]
fn identity_solve_to_stdout() {
    let out = krybound(&["solve", "--gen", "identity", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let t = Trace::read_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(t.rows.len(), 2);
    assert_eq!(t.metadata["problem"], "identity");
    let res = column(&t, |r| r.residual_norm.as_ref().map(|v| v.to_f64()));
    assert!((res[0] - 1.0).abs() < 1e-15);
    assert!(res[1] < 1e-15);
}

#[test]
fn stair_extended_reaches_rounding_floor_and_is_deterministic() {
    let dir = tempdir().unwrap();
    let args = |p: &str| {
        vec![
            "solve".to_string(),
            "--gen=stair".into(),
            "--solver=ba-gmres".into(),
            "-l".into(),
            "8".into(),
            "--precision=extended".into(),
            "--out".into(),
            dir.path().join(p).to_string_lossy().into_owned(),
        ]
    };
    for p in ["a.csv", "b.csv"] {
        let a: Vec<String> = args(p);
        let out = krybound(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());
    let t = Trace::read_csv(a.as_slice()).unwrap();
    let pre = column(&t, |r| r.preconditioned_residual_norm.as_ref().map(|v| v.to_f64()));
    assert!(pre.len() > 6);
    assert!(pre[6] <= 1e-24, "k = 6 preconditioned residual {}", pre[6]);
}

#[test]
fn bound_columns_dominate_greenbaum_residuals() {
    let out = krybound(&["bound", "--gen", "greenbaum", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let t = Trace::read_json(out.stdout.as_slice()).unwrap();
    let r0 = t.rows[0].residual_norm.as_ref().unwrap().to_f64();
    for row in &t.rows {
        let r = row.residual_norm.as_ref().unwrap().to_f64();
        let b = row.bound_theorem1.as_ref().unwrap().to_f64();
        // The bound reaches 0 at k = n; the computed residual stops at rounding level.
        assert!(b >= r - 1e-12 * r0, "k = {}: bound {b} < residual {r}", row.k);
    }
}

#[test]
fn iteration_limit_exits_two() {
    let out = krybound(&["solve", "--gen", "greenbaum", "--maxit", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_iterations"));
}

#[test]
fn bad_arguments_exit_one() {
    for args in [
        &["solve", "--gen", "stair", "--omega", "2.5", "--solver", "ba-gmres"][..],
        &["solve", "--gen", "stair", "--solver", "gmres"],
        &["solve"],
        &["solve", "--gen", "nonsense"],
        &["solve", "--mtx", "/nonexistent/a.mtx"],
    ] {
        let out = krybound(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(krybound(&["--help"]).status.code(), Some(0));
}

#[test]
fn generated_files_solve_like_the_generator() {
    let dir = tempdir().unwrap();
    let mtx = dir.path().join("stair.mtx");
    let mtx_s = mtx.to_str().unwrap();
    let gen = krybound(&["gen", "--gen", "stair", "--out", mtx_s]);
    assert_eq!(gen.status.code(), Some(0), "{}", String::from_utf8_lossy(&gen.stderr));
    assert!(dir.path().join("stair.rhs.mtx").exists());

    let solve = ["solve", "--solver", "ba-gmres", "-l", "2"];
    let rhs = dir.path().join("stair.rhs.mtx");
    let from_file = krybound(&[&solve[..], &["--mtx", mtx_s, "--rhs", rhs.to_str().unwrap()]].concat());
    let direct = krybound(&[&solve[..], &["--gen", "stair"]].concat());
    assert_eq!(from_file.status.code(), Some(0), "{}", String::from_utf8_lossy(&from_file.stderr));
    let a = Trace::read_csv(from_file.stdout.as_slice()).unwrap();
    let b = Trace::read_csv(direct.stdout.as_slice()).unwrap();
    let get = |r: &krybound_cli::trace::TraceRow| r.preconditioned_residual_norm.as_ref().map(|v| v.to_f64());
    let (ca, cb) = (column(&a, get), column(&b, get));
    assert_eq!(ca.len(), cb.len());
    for (x, y) in ca.iter().zip(&cb) {
        assert!((x - y).abs() <= 1e-13 * cb[0], "{x} vs {y}");
    }
}

#[test]
fn reproduce_exit_codes() {
    let ok = krybound(&["reproduce", "greenbaum"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("0 failing row(s)"));

    let empty = tempdir().unwrap();
    let skip = krybound(&["reproduce", "maragal", "--data-dir", empty.path().to_str().unwrap()]);
    assert_eq!(skip.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&skip.stdout).contains("skipped"));

    let table3 = krybound(&["reproduce", "table3"]);
    assert_eq!(table3.status.code(), Some(2));
}
