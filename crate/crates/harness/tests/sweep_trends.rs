use shqp_harness::config::{Algorithm, ExperimentConfig, ProblemDef, SweepGrid, X0Def};
use shqp_harness::sweep::run_sweep;

fn memory_sweep(
    problem: &str,
    x0: Vec<f64>,
    tau: Vec<f64>,
    pbar: Vec<usize>,
    convex_tau_zero: bool,
) -> Vec<(f64, usize, f64)> {
    let mut cfg = ExperimentConfig::new(ProblemDef::Named(problem.into()), Algorithm::MemoryShqp);
    cfg.x0 = Some(X0Def::Point(x0));
    cfg.convex_tau_zero = convex_tau_zero;
    cfg.sweep = SweepGrid {
        tau,
        pbar,
        seeds: vec![],
    };
    run_sweep(&cfg)
        .unwrap()
        .into_iter()
        .map(|r| {
            assert!(r.error.is_none(), "{:?}", r.error);
            (r.tau, r.pbar, r.tail_pbar_ratio.unwrap_or(0.0))
        })
        .collect()
}

#[test]
fn more_memory_never_hurts_on_convex_pair() {
    let rows = memory_sweep(
        "halfspace-pair",
        vec![1.3, 0.7],
        vec![0.3],
        vec![1, 4, 16],
        false,
    );
    assert!(
        rows.windows(2).all(|w| w[1].2 <= w[0].2 + 1e-12),
        "{rows:?}"
    );
}

#[test]
fn smaller_tau_contracts_faster_on_circle_line() {
    let s = 3f64.sqrt() / 2.0;
    let rows = memory_sweep(
        "circle-line",
        vec![s + 0.03, 0.48],
        vec![0.2, 0.1, 0.05],
        vec![4],
        true,
    );
    assert!(rows.windows(2).all(|w| w[1].2 < w[0].2), "{rows:?}");
}
