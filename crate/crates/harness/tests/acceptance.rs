//! One pass/fail line per acceptance criterion. Run with `--nocapture` to see
//! the report; the test fails if any criterion fails.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::Rng;
use shqp_core::diagnostics::{analyze_errors, estimate_regularity, predicted_bounds};
use shqp_core::linalg::{random_in_ball, random_unit, seeded_rng};
use shqp_core::polyhedra::{
    derived_halfspace, eta, project_onto_polyhedron, ConstraintKind, Halfspace, Polyhedron,
    QpStatus,
};
use shqp_core::sets::{check_sosh, check_super_regular};
use shqp_core::solvers::{
    run_averaged_projections, run_basic_shqp, run_map, run_mass_projection, run_two_shqp,
    PairingRule, ProblemInstance, Schedule, SolverConfig, StepKind, TerminalStatus, Trace,
};
use shqp_core::Point;
use shqp_harness::config::{Algorithm, ExperimentConfig, ProblemDef, SweepGrid, X0Def};
use shqp_harness::experiment::run;
use shqp_harness::gallery::{self, GalleryEntry};
use shqp_harness::sweep::run_sweep;

type Verdict = Result<String, String>;

fn entry(name: &str) -> GalleryEntry {
    gallery::entry(name).expect("listed").expect("builds")
}

fn p(v: &[f64]) -> Point {
    Point::from_row_slice(v)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(started: Instant, limit: Duration) -> Result<(), String> {
    let t = started.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

fn c1_backtracking_example() -> Verdict {
    let started = Instant::now();
    let e = entry("backtrack-example");
    let x0 = p(&[0.0, 1.0, 0.0]);
    let d0 = e.problem.distances(&x0).map_err(|e| e.to_string())?;
    ensure((d0[0] - 1.0).abs() <= 1e-12, || {
        format!("d(x0,K1) = {}", d0[0])
    })?;
    ensure((d0[1] - 3.0 / 10f64.sqrt()).abs() <= 1e-12, || {
        format!("d(x0,K2) = {}", d0[1])
    })?;
    let cfg = SolverConfig::default();
    let t = run_mass_projection(&e.problem, &x0, &cfg).map_err(|e| e.to_string())?;
    let x1 = &t.records[1].point;
    ensure((x1 - p(&[-6.0, 0.0, 0.0])).norm() <= 1e-9, || {
        format!("x1 = {x1:?}")
    })?;
    let d12 = t.records[1].distances[1];
    ensure((d12 - 2.0 * 3f64.sqrt()).abs() <= 1e-9, || {
        format!("d(x1,K2) = {d12}")
    })?;
    ensure(t.status == TerminalStatus::Converged, || {
        format!("status {}", t.status)
    })?;
    let last = t.records.last().unwrap();
    ensure(last.max_distance() <= 1e-10, || {
        format!("final max distance {}", last.max_distance())
    })?;
    ensure(last.outer < 2, || {
        format!("{} outer iterations", last.outer + 1)
    })?;
    within_time(started, Duration::from_secs(1))?;
    Ok(format!(
        "x1 = (-6,0,0), d(x1,K2) = {d12:.12}, {} outer iterations, {} QP steps",
        last.outer + 1,
        t.qp_steps()
    ))
}

/// Minimum-distance feasible point over every active subset.
fn brute_force(cons: &[Halfspace], x0: &Point) -> Option<Point> {
    let k = cons.len();
    let feasible = |x: &Point| {
        cons.iter()
            .all(|h| h.distance(x) <= 1e-12 * (1.0 + x.norm()))
    };
    let mut best: Option<Point> = None;
    for mask in 0u32..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        if cons
            .iter()
            .enumerate()
            .any(|(i, h)| h.is_equality() && !idx.contains(&i))
        {
            continue;
        }
        let x = if idx.is_empty() {
            x0.clone()
        } else {
            let a = DMatrix::from_fn(idx.len(), x0.len(), |r, c| cons[idx[r]].normal[c]);
            let b = DVector::from_fn(idx.len(), |r, _| cons[idx[r]].offset);
            let r = &a * x0 - b;
            let Ok(d) = a.svd(true, true).solve(&r, 1e-12) else {
                continue;
            };
            x0 - d
        };
        if feasible(&x)
            && best
                .as_ref()
                .is_none_or(|b| (&x - x0).norm() < (b - x0).norm())
        {
            best = Some(x);
        }
    }
    best
}

fn c2_qp_oracle() -> Verdict {
    let started = Instant::now();
    let mut rng = seeded_rng(2);
    let (mut optimal, mut infeasible) = (0, 0);
    let mut worst: f64 = 0.0;
    for case in 0..10_000 {
        let n = rng.random_range(1..=3);
        let k = rng.random_range(1..=4);
        let cons: Vec<Halfspace> = (0..k)
            .map(|_| {
                let a = random_unit(&mut rng, n) * rng.random_range(0.2..2.0);
                let kind = if rng.random_bool(0.2) {
                    ConstraintKind::Equality
                } else {
                    ConstraintKind::Inequality
                };
                Halfspace::new(a, rng.random_range(-1.0..1.0), kind).unwrap()
            })
            .collect();
        let x0 = Point::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
        let qp = project_onto_polyhedron(&Polyhedron::new(cons.clone()).unwrap(), &x0)
            .map_err(|e| e.to_string())?;
        match brute_force(&cons, &x0) {
            Some(b) => {
                ensure(qp.status == QpStatus::Optimal, || {
                    format!("case {case}: QP infeasible, brute force found {b:?}")
                })?;
                let err = (&qp.point - &b).norm() / b.norm().max(1.0);
                worst = worst.max(err);
                ensure(err <= 1e-8, || format!("case {case}: mismatch {err:e}"))?;
                optimal += 1;
            }
            None => {
                ensure(qp.status == QpStatus::Infeasible, || {
                    format!("case {case}: brute force found no point")
                })?;
                infeasible += 1;
            }
        }
    }
    within_time(started, Duration::from_secs(30))?;
    Ok(format!(
        "10000 polyhedra ({optimal} nonempty, {infeasible} empty), worst relative gap {worst:.1e}"
    ))
}

fn c3_derived_halfspace_bound() -> Verdict {
    let mut rng = seeded_rng(3);
    let mut checked = 0;
    let mut worst_slack = f64::INFINITY;
    while checked < 1000 {
        let n = rng.random_range(2..=3);
        let k = rng.random_range(1..=4);
        let normals: Vec<Point> = (0..k).map(|_| random_unit(&mut rng, n)).collect();
        let e = eta(&normals).map_err(|e| e.to_string())?;
        if e < 0.1 {
            continue;
        }
        let alpha = rng.random_range(0.01..1.0);
        let xbar = Point::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let cons: Vec<Halfspace> = normals
            .iter()
            .map(|v| {
                Halfspace::inequality(v.clone(), v.dot(&xbar) + rng.random_range(0.0..=alpha))
                    .unwrap()
            })
            .collect();
        let poly = Polyhedron::new(cons).unwrap();
        let xp = &xbar + random_unit(&mut rng, n) * rng.random_range(0.5..5.0);
        if poly.max_violation(&xp) <= 1e-6 {
            continue;
        }
        let h = derived_halfspace(&poly, &xp).map_err(|e| e.to_string())?;
        let d = h.boundary_distance(&xbar);
        ensure(d <= alpha / e + 1e-9, || {
            format!("bundle {checked}: {d} > {}", alpha / e)
        })?;
        worst_slack = worst_slack.min(alpha / e - d);
        checked += 1;
    }
    Ok(format!(
        "1000 bundles with eta >= 0.1, smallest margin {worst_slack:.2e}"
    ))
}

/// `min ‖Σ λ_i v_i‖` over the simplex by grid search, refined around the
/// best node until the spacing reaches 1e-4.
fn grid_eta(normals: &[Point]) -> f64 {
    let k = normals.len();
    let value = |free: &[f64]| -> Option<f64> {
        let last = 1.0 - free.iter().sum::<f64>();
        if last < -1e-15 || free.iter().any(|&l| l < -1e-15) {
            return None;
        }
        let mut v = &normals[k - 1] * last.max(0.0);
        for (l, n) in free.iter().zip(normals) {
            v += n * *l;
        }
        Some(v.norm())
    };
    if k == 1 {
        return 1.0;
    }
    let dims = k - 1;
    let mut h = 1.0 / 40.0;
    let mut center = vec![0.0; dims];
    let mut span = 40i64;
    let mut lo = vec![0.0; dims];
    let mut best = (f64::INFINITY, center.clone());
    loop {
        let count = (2 * span + 1) as usize;
        let mut idx = vec![0usize; dims];
        'grid: loop {
            let pt: Vec<f64> = (0..dims).map(|d| lo[d] + idx[d] as f64 * h).collect();
            if let Some(v) = value(&pt) {
                if v < best.0 {
                    best = (v, pt);
                }
            }
            for i in idx.iter_mut() {
                *i += 1;
                if *i < count {
                    continue 'grid;
                }
                *i = 0;
            }
            break;
        }
        if h <= 1e-4 {
            return best.0;
        }
        center.clone_from(&best.1);
        h /= 2.0;
        span = 4;
        lo = center.iter().map(|c| c - span as f64 * h).collect();
        if h < 1e-4 {
            h = 1e-4;
        }
    }
}

fn c4_eta() -> Verdict {
    let mut rng = seeded_rng(4);
    let mut worst: f64 = 0.0;
    for b in 0..200 {
        let n = rng.random_range(2..=3);
        let k = rng.random_range(1..=4);
        let normals: Vec<Point> = (0..k).map(|_| random_unit(&mut rng, n)).collect();
        let e = eta(&normals).map_err(|e| e.to_string())?;
        let g = grid_eta(&normals);
        worst = worst.max((e - g).abs());
        ensure((e - g).abs() <= 1e-3, || {
            format!("bundle {b}: eta {e} vs grid {g}")
        })?;
        ensure(e <= g + 1e-9, || {
            format!("bundle {b}: eta {e} above a grid value {g}")
        })?;
    }
    Ok(format!("200 bundles, worst |eta - grid| = {worst:.1e}"))
}

/// `d(x, K)` along the outer iterates, above a small floor.
fn outer_errors(problem: &ProblemInstance, t: &Trace) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for x in t.outer_iterates() {
        let d = problem
            .intersection_distance(&x)
            .map_err(|e| e.to_string())?;
        if d <= 1e-13 {
            break;
        }
        out.push(d);
    }
    Ok(out)
}

/// Geometric mean of the last quarter (at least one) of the ratios.
fn tail_rate(errors: &[f64]) -> Option<f64> {
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    if ratios.is_empty() {
        return None;
    }
    let take = (ratios.len() / 4).max(1);
    let tail = &ratios[ratios.len() - take..];
    Some((tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64).exp())
}

fn c5_linear_convergence() -> Verdict {
    let mut summary = Vec::new();
    for name in ["circle-line", "rank1-affine"] {
        let e = entry(name);
        let xs = e.problem.known_solution().unwrap().clone();
        let rho_cap = match e.certified.beta {
            Some(_) => {
                let est = estimate_regularity(&e.problem, &xs, &[0.05], 300, 5, false)
                    .map_err(|e| e.to_string())?;
                Some(
                    predicted_bounds(2, est.beta_hat, 0.0)
                        .map_err(|e| e.to_string())?
                        .rho_block,
                )
            }
            None => None,
        };
        let cfg = SolverConfig {
            stop_tolerance: 1e-12,
            max_outer_iterations: 2000,
            ..SolverConfig::default()
        };
        for alg in ["map", "basic-shqp"] {
            let mut worst: f64 = 0.0;
            for seed in 0..20u64 {
                let mut rng = seeded_rng(500 + seed);
                let x0 = random_in_ball(&mut rng, &xs, 0.05);
                let t = if alg == "map" {
                    run_map(&e.problem, &x0, &cfg)
                } else {
                    run_basic_shqp(
                        &e.problem,
                        &Schedule::cyclic(2, PairingRule::Latest),
                        &x0,
                        &cfg,
                    )
                }
                .map_err(|e| e.to_string())?;
                ensure(t.status == TerminalStatus::Converged, || {
                    format!("{name}/{alg} seed {seed}: {}", t.status)
                })?;
                let err = outer_errors(&e.problem, &t)?;
                ensure(err.iter().all(|&d| d <= 0.2), || {
                    format!("{name}/{alg} seed {seed}: left the neighbourhood")
                })?;
                let Some(r) = tail_rate(&err) else { continue };
                ensure(r < 1.0, || {
                    format!("{name}/{alg} seed {seed}: tail ratio {r}")
                })?;
                let k = err.len();
                // Geometric decrease: over the second half of the run every
                // error is below the first one times the tail rate's bound.
                ensure(err[k / 2..].windows(2).all(|w| w[1] < w[0]), || {
                    format!("{name}/{alg} seed {seed}: errors not decreasing {err:?}")
                })?;
                if let Some(cap) = rho_cap {
                    ensure(r <= cap + 0.02, || {
                        format!("{name}/{alg} seed {seed}: rate {r} above {cap}")
                    })?;
                }
                worst = worst.max(r);
            }
            summary.push(format!("{name}/{alg} worst tail ratio {worst:.3}"));
        }
        if let Some(cap) = rho_cap {
            summary.push(format!("{name} predicted rho {cap:.4}"));
        }
    }
    Ok(summary.join("; "))
}

fn rate_run(problem: &str, x0: &[f64]) -> Result<(f64, Vec<f64>), String> {
    let mut cfg = ExperimentConfig::new(ProblemDef::Named(problem.into()), Algorithm::Mass);
    cfg.x0 = Some(X0Def::Point(x0.to_vec()));
    cfg.tol = 1e-15;
    cfg.max_iters = 50;
    let out = run(&cfg).map_err(|e| e.to_string())?;
    let r = out.diagnostics.rate_report.clone()?;
    let errs: Vec<f64> = out
        .trace
        .outer_iterates()
        .iter()
        .map(|x| (x - &out.diagnostics.xbar).norm())
        .collect();
    Ok((r.estimated_order, errs))
}

fn newton_parabolas(x0: [f64; 2]) -> Vec<f64> {
    let target = Vector2::new(1.0, 1.0);
    let mut x = Vector2::new(x0[0], x0[1]);
    let mut errs = vec![(x - target).norm()];
    for _ in 0..20 {
        let f = Vector2::new(x[0] * x[0] - x[1], x[0] * x[0] + x[1] - 2.0);
        let j = Matrix2::new(2.0 * x[0], -1.0, 2.0 * x[0], 1.0);
        let Some(step) = j.lu().solve(&f) else { break };
        x -= step;
        let e = (x - target).norm();
        errs.push(e);
        if e < 1e-15 {
            break;
        }
    }
    errs
}

fn c6_newton_rate() -> Verdict {
    let started = Instant::now();
    let (order_cl, _) = rate_run("circle-line", &[1.5, 1.5])?;
    ensure(order_cl >= 1.5, || format!("circle-line order {order_cl}"))?;
    let (order_tp, errs) = rate_run("two-parabolas", &[2.0, 1.0])?;
    ensure((order_tp - 2.0).abs() <= 0.3, || {
        format!("two-parabolas order {order_tp}, errors {errs:?}")
    })?;
    let newton = newton_parabolas([2.0, 1.0]);
    let nr = analyze_errors(&newton, 1, 100.0 * f64::EPSILON * 2f64.sqrt())
        .map_err(|e| e.to_string())?;
    ensure((nr.estimated_order - order_tp).abs() <= 0.3, || {
        format!("Newton order {} vs mass {order_tp}", nr.estimated_order)
    })?;
    within_time(started, Duration::from_secs(5))?;
    Ok(format!(
        "circle-line order {order_cl:.2}; two-parabolas order {order_tp:.2}, Newton {:.2}",
        nr.estimated_order
    ))
}

fn c7_memory_contraction() -> Verdict {
    let s = 3f64.sqrt() / 2.0;
    let mut cfg = ExperimentConfig::new(
        ProblemDef::Named("circle-line".into()),
        Algorithm::MemoryShqp,
    );
    cfg.x0 = Some(X0Def::Point(vec![s + 0.03, 0.5 - 0.02]));
    cfg.convex_tau_zero = true;
    cfg.sweep = SweepGrid {
        tau: vec![0.2, 0.1, 0.05],
        pbar: vec![4, 8],
        seeds: vec![],
    };
    let rows = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for pbar in [4usize, 8] {
        let sel: Vec<_> = rows.iter().filter(|r| r.pbar == pbar).collect();
        let mut ratios = Vec::new();
        for r in &sel {
            ensure(r.error.is_none(), || {
                format!("tau {} pbar {pbar}: {:?}", r.tau, r.error)
            })?;
            ensure(r.fejer_ok == Some(true), || {
                format!("tau {} pbar {pbar}: Fejer check failed", r.tau)
            })?;
            let ratio = r
                .tail_pbar_ratio
                .ok_or_else(|| format!("tau {} pbar {pbar}: no ratio", r.tau))?;
            let bound = r.predicted_contraction.ok_or("no predicted bound")?;
            if bound < 1.0 {
                ensure(ratio <= bound + 0.05, || {
                    format!("tau {}: ratio {ratio} above {bound}", r.tau)
                })?;
            }
            ratios.push((r.tau, ratio, bound));
        }
        ensure(ratios.windows(2).all(|w| w[1].1 < w[0].1), || {
            format!("pbar {pbar}: not monotone {ratios:?}")
        })?;
        summary.push(format!(
            "pbar {pbar}: {}",
            ratios
                .iter()
                .map(|(t, r, b)| format!("tau {t} ratio {r:.1e} (8Lτ {b:.1})"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    Ok(summary.join("; "))
}

fn c8_two_step() -> Verdict {
    let e = entry("two-shqp-wedge");
    let cfg = SolverConfig {
        max_outer_iterations: 1,
        ..SolverConfig::default()
    };
    let x0 = e.default_x0.clone();
    let t = run_two_shqp(&e.problem, &x0, &cfg).map_err(|e| e.to_string())?;
    let x1 = &t.records[1].point;
    let x2 = &t.records[2].point;
    let x3 = &t.records[3].point;
    // Hypothesis: convex sets (δ = 0) and an acute angle at x1.
    let (u, v) = (&x0 - x1, x2 - x1);
    let theta = (u.dot(&v) / (u.norm() * v.norm())).acos();
    ensure(theta < std::f64::consts::FRAC_PI_2, || {
        format!("angle {theta} not acute")
    })?;
    ensure(t.records[3].kind == StepKind::QpProjection, || {
        format!("third step is {}", t.records[3].kind)
    })?;
    let d2 = e
        .problem
        .intersection_distance(x2)
        .map_err(|e| e.to_string())?;
    let d3 = e
        .problem
        .intersection_distance(x3)
        .map_err(|e| e.to_string())?;
    ensure(d3 < d2, || {
        format!("d(x3,K) = {d3} not below d(x2,K) = {d2}")
    })?;

    let lines = entry("two-lines-theta");
    let y0 = p(&[1.0, -1.0]);
    let t = run_two_shqp(&lines.problem, &y0, &cfg).map_err(|e| e.to_string())?;
    let (y1, y2) = (&t.records[1].point, &t.records[2].point);
    let phi = ((&y0 - y1).dot(&(y2 - y1)) / ((&y0 - y1).norm() * (y2 - y1).norm())).acos();
    ensure(phi >= std::f64::consts::FRAC_PI_2, || {
        format!("angle {phi} not obtuse")
    })?;
    let copy = &t.records[3];
    ensure(copy.kind == StepKind::Copy && copy.point == *y2, || {
        format!("third step is {}", copy.kind)
    })?;
    Ok(format!(
        "wedge angle {theta:.4}, d(x2,K) = {d2:.4} > d(x3,K) = {d3:.2e}; obtuse angle {phi:.4} copies x2"
    ))
}

fn c9_averaged_monotone() -> Verdict {
    let cfg = SolverConfig {
        max_outer_iterations: 200,
        ..SolverConfig::default()
    };
    let mut steps = 0;
    for e in gallery::all() {
        let xs = e.problem.known_solution().unwrap();
        for seed in 0..20u64 {
            let mut rng = seeded_rng(900 + seed);
            let x0 = random_in_ball(&mut rng, xs, 1.0);
            let t =
                run_averaged_projections(&e.problem, &x0, &cfg).map_err(|err| err.to_string())?;
            for (k, w) in t.records.windows(2).enumerate() {
                let (a, b) = (w[0].sum_of_squares(), w[1].sum_of_squares());
                ensure(b <= a + 1e-12, || {
                    format!("{} seed {seed} step {k}: {a} -> {b}", e.name)
                })?;
                steps += 1;
            }
        }
    }
    Ok(format!(
        "{} entries x 20 starts, {steps} steps nonincreasing",
        gallery::NAMES.len()
    ))
}

fn c10_samplers() -> Verdict {
    let mut notes = Vec::new();
    for e in gallery::all().into_iter().filter(|e| e.certified.convex) {
        let xs = e.problem.known_solution().unwrap();
        for (l, set) in e.problem.sets().iter().enumerate() {
            let r =
                check_super_regular(set, xs, 0.0, 0.5, 200, 10).map_err(|err| err.to_string())?;
            ensure(r.holds, || {
                format!("{} set {}: worst {}", e.name, l + 1, r.worst)
            })?;
        }
        notes.push(e.name);
    }
    let ua = entry("union-axes");
    let r = check_super_regular(&ua.problem.sets()[0], &p(&[0.0, 0.0]), 0.5, 0.5, 200, 10)
        .map_err(|e| e.to_string())?;
    ensure(!r.holds, || {
        format!("union-axes passed with worst {}", r.worst)
    })?;

    let tp = entry("two-parabolas");
    let corner = tp.problem.known_solution().unwrap();
    let mut m_tp: f64 = 0.0;
    for set in tp.problem.sets() {
        for radius in [0.1, 0.01, 0.001] {
            let s = check_sosh(set, corner, 1.0, radius, 200, 11).map_err(|e| e.to_string())?;
            ensure(s.holds, || {
                format!(
                    "two-parabolas SOSH with M = 1 fails at {radius}: {}",
                    s.worst
                )
            })?;
            m_tp = m_tp.max(s.worst);
        }
    }

    let cusp = entry("cusp");
    let origin = p(&[0.0, 0.0]);
    let mut worst = Vec::new();
    for radius in [0.1, 0.01, 0.001] {
        worst.push(
            check_sosh(&cusp.problem.sets()[0], &origin, 0.0, radius, 200, 12)
                .map_err(|e| e.to_string())?
                .worst,
        );
    }
    ensure(worst.windows(2).all(|w| w[1] > w[0]), || {
        format!("cusp ratios not growing: {worst:?}")
    })?;
    let m = worst[0];
    let fails = check_sosh(&cusp.problem.sets()[0], &origin, m, 0.001, 200, 12)
        .map_err(|e| e.to_string())?;
    ensure(!fails.holds, || {
        "cusp passes at the smallest radius".to_string()
    })?;
    Ok(format!(
        "super-regular: {}; union-axes worst {:.2} > 0.5; two-parabolas M <= {m_tp:.3}; cusp ratios {:.1}, {:.1}, {:.1}",
        notes.join(", "),
        r.worst,
        worst[0],
        worst[1],
        worst[2]
    ))
}

type Criterion = (&'static str, fn() -> Verdict);

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("backtracking example", c1_backtracking_example),
        ("QP oracle equivalence", c2_qp_oracle),
        ("derived halfspace bound", c3_derived_halfspace_bound),
        ("eta correctness", c4_eta),
        ("linear convergence", c5_linear_convergence),
        ("Newton-rate convergence", c6_newton_rate),
        ("memory contraction", c7_memory_contraction),
        ("two-step distance drop", c8_two_step),
        ("averaged projections monotone", c9_averaged_monotone),
        ("regularity samplers", c10_samplers),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", k + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL {name}: {why}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
