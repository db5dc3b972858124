use krybound_core::bounds::{bound_curve, decompose_rhs};
use krybound_core::generators::{
    exp_decay_matrix, load_matrix_market, stair_matrix, write_matrix_market_array, ProblemInstance,
};
use krybound_core::gmres::{ba_gmres, GmresOptions, OperatorHandle};
use krybound_core::linalg::Matrix;
use krybound_core::nrsor::{explicit_preconditioner, nrsor_apply, nrsor_ba_gmres, preconditioned_matrix, NrsorConfig};
use krybound_core::DoubleDouble;

#[test]
fn matrix_market_file_round_trip_keeps_extended_digits() {
    let p = exp_decay_matrix::<DoubleDouble>(6, 3).unwrap();
    let path = std::env::temp_dir().join(format!("krybound-pipeline-{}.mtx", std::process::id()));
    let mut buf = Vec::new();
    write_matrix_market_array(&mut buf, &p.a).unwrap();
    std::fs::write(&path, &buf).unwrap();
    let back: ProblemInstance<DoubleDouble> = load_matrix_market(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let err = back.a.sub(&p.a).max_abs().to_f64();
    assert!(err < 1e-30, "{err:e}");
}

#[test]
fn implicit_and_explicit_preconditioners_give_the_same_iterates() {
    let p = stair_matrix::<f64>(438);
    let cfg = NrsorConfig::new(&p.a, 1.0, 3).unwrap();
    let opts = GmresOptions {
        rtol: 1e-12,
        max_iterations: 8,
        ..GmresOptions::default()
    };
    let implicit = nrsor_ba_gmres(&p.a, &cfg, &p.b, None, &opts).unwrap();
    let bmat = explicit_preconditioner(&p.a, 1.0, 3).unwrap();
    let explicit = ba_gmres(&p.a, &OperatorHandle::from_matrix(&bmat), &p.b, None, &opts).unwrap();
    assert_eq!(implicit.records.len(), explicit.records.len());
    let scale = implicit.records[0].precond_residual_norm;
    for (x, y) in implicit.records.iter().zip(&explicit.records) {
        assert!((x.precond_residual_norm - y.precond_residual_norm).abs() <= 1e-8 * scale, "k={}", x.k);
    }
}

#[test]
fn preconditioned_bound_dominates_ba_gmres_trace() {
    type D = DoubleDouble;
    let p = exp_decay_matrix::<D>(12, 1).unwrap();
    let cfg = NrsorConfig::new(&p.a, D::ONE, 2).unwrap();
    let opts = GmresOptions {
        rtol: 1e-28,
        max_iterations: 12,
        ..GmresOptions::for_precision::<D>()
    };
    let t = nrsor_ba_gmres(&p.a, &cfg, &p.b, None, &opts).unwrap();
    let m: Matrix<D> = preconditioned_matrix(&p.a, D::ONE, 2).unwrap();
    let r0 = nrsor_apply(&p.a, &cfg, &p.b).unwrap();
    let e = decompose_rhs(&m, &r0).unwrap();
    let bounds = bound_curve(&e, t.iterations).unwrap().by_iteration(e.r0_norm);
    for r in &t.records {
        let slack = D::from(1e-25);
        assert!(r.arnoldi_residual <= bounds[r.k] + slack, "k={}", r.k);
    }
}
