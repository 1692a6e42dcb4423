//! One experiment: solve, then attach diagnostics.

use std::time::Instant;

use shqp_core::diagnostics::{
    analyze_trace, estimate_regularity, predicted_bounds, PredictedBounds, RateReport,
    RegularityEstimate,
};
use shqp_core::solvers::{
    run_averaged_projections, run_basic_shqp, run_global, run_map, run_mass_projection,
    run_memory_shqp, run_two_shqp, ProblemInstance, Schedule, SolverConfig, Trace,
};
use shqp_core::Point;

use crate::config::{Algorithm, ExperimentConfig, Resolved};

/// Radii of the regularity profile around `x̄`.
pub const PROFILE_RADII: [f64; 3] = [0.1, 0.01, 0.001];
pub const PROFILE_SAMPLES: usize = 200;
/// A final iterate this close to the known solution is measured against it.
const KNOWN_SOLUTION_RADIUS: f64 = 1e-6;
const REFERENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub xbar: Point,
    pub rate_report: Result<RateReport, String>,
    pub regularity: Result<RegularityEstimate, String>,
    pub predicted_bounds: Result<PredictedBounds, String>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub config: ExperimentConfig,
    pub x0: Point,
    pub trace: Trace,
    pub diagnostics: Diagnostics,
    pub wallclock_ms: f64,
}

pub fn solve(
    algorithm: Algorithm,
    problem: &ProblemInstance,
    schedule: &Schedule,
    x0: &Point,
    cfg: &SolverConfig,
    exp: &ExperimentConfig,
) -> shqp_core::Result<Trace> {
    match algorithm {
        Algorithm::Map => run_map(problem, x0, cfg),
        Algorithm::BasicShqp => run_basic_shqp(problem, schedule, x0, cfg),
        Algorithm::Mass => run_mass_projection(problem, x0, cfg),
        Algorithm::MemoryShqp => run_memory_shqp(problem, x0, cfg),
        Algorithm::TwoShqp => run_two_shqp(problem, x0, cfg),
        Algorithm::Averaged => run_averaged_projections(problem, x0, cfg),
        Algorithm::Global => run_global(problem, x0, exp.merit(), cfg),
    }
}

/// The limit point rates are measured against: the known solution if the
/// run ended next to it, otherwise the end of a tighter rerun.
pub fn reference_point(
    exp: &ExperimentConfig,
    resolved: &Resolved,
    x0: &Point,
    trace: &Trace,
) -> shqp_core::Result<Point> {
    let last = trace.last_point();
    if let Some(xs) = resolved.problem.known_solution() {
        if (last - xs).norm() <= KNOWN_SOLUTION_RADIUS {
            return Ok(xs.clone());
        }
    }
    let mut cfg = exp.solver_config();
    cfg.stop_tolerance = REFERENCE_TOL;
    cfg.max_outer_iterations = cfg.max_outer_iterations.max(1000);
    let tight = solve(
        exp.algorithm,
        &resolved.problem,
        &resolved.schedule,
        x0,
        &cfg,
        exp,
    )?;
    Ok(tight.last_point().clone())
}

pub fn diagnose(
    exp: &ExperimentConfig,
    resolved: &Resolved,
    x0: &Point,
    trace: &Trace,
) -> shqp_core::Result<Diagnostics> {
    let xbar = reference_point(exp, resolved, x0, trace)?;
    let rate_report = analyze_trace(trace, &xbar, exp.pbar.max(1)).map_err(|e| e.to_string());
    let regularity = estimate_regularity(
        &resolved.problem,
        &xbar,
        &PROFILE_RADII,
        PROFILE_SAMPLES,
        exp.rng_seed,
        true,
    )
    .map_err(|e| e.to_string());
    let beta = resolved
        .certified
        .beta
        .or_else(|| regularity.as_ref().ok().map(|r| r.beta_hat));
    let predicted_bounds = match beta {
        Some(b) => {
            predicted_bounds(resolved.problem.set_count(), b, exp.tau).map_err(|e| e.to_string())
        }
        None => Err("no regularity constant available".to_string()),
    };
    Ok(Diagnostics {
        xbar,
        rate_report,
        regularity,
        predicted_bounds,
    })
}

/// Resolves, draws the start from `rng_seed`, solves and diagnoses.
pub fn run(exp: &ExperimentConfig) -> Result<Outcome, crate::Error> {
    let resolved = exp.resolve()?;
    run_resolved(exp, &resolved)
}

pub fn run_resolved(exp: &ExperimentConfig, resolved: &Resolved) -> Result<Outcome, crate::Error> {
    let x0 = resolved.x0.draw(exp.rng_seed);
    let started = Instant::now();
    let trace = solve(
        exp.algorithm,
        &resolved.problem,
        &resolved.schedule,
        &x0,
        &exp.solver_config(),
        exp,
    )?;
    let wallclock_ms = started.elapsed().as_secs_f64() * 1e3;
    let diagnostics = diagnose(exp, resolved, &x0, &trace)?;
    Ok(Outcome {
        config: exp.clone(),
        x0,
        trace,
        diagnostics,
        wallclock_ms,
    })
}
