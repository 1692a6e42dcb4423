use super::trace::Recorder;
use super::{ProblemInstance, SolverConfig, StepKind, TerminalStatus, Trace};
use crate::{Point, Result};

/// Cyclic projections `x ← P_{K_m} ∘ … ∘ P_{K_1}(x)`.
///
/// A set already within the stopping tolerance is skipped, so consecutive
/// records always differ.
pub fn run_map(problem: &ProblemInstance, x0: &Point, cfg: &SolverConfig) -> Result<Trace> {
    cfg.validate()?;
    let mut rec = Recorder::start(problem, x0, cfg.stop_tolerance)?;
    for i in 0..cfg.max_outer_iterations {
        for (l, set) in problem.sets().iter().enumerate() {
            if rec.converged() {
                return Ok(rec.finish(TerminalStatus::Converged));
            }
            let p = set.project(rec.current())?;
            if p.distance <= cfg.stop_tolerance || p.nearest == *rec.current() {
                continue;
            }
            rec.push(i, l + 1, p.nearest, StepKind::SetProjection(l), None)?;
        }
    }
    Ok(rec.finish_capped())
}

/// Mean of the projections onto every set.
pub(crate) fn averaged_point(problem: &ProblemInstance, x: &Point) -> Result<Point> {
    let mut sum = Point::zeros(x.len());
    for set in problem.sets() {
        sum += set.project(x)?.nearest;
    }
    Ok(sum / problem.set_count() as f64)
}

/// Averaged projections `x ← (1/m) Σ P_{K_l}(x)`. Stops early if the
/// iterate stops moving away from the intersection.
pub fn run_averaged_projections(
    problem: &ProblemInstance,
    x0: &Point,
    cfg: &SolverConfig,
) -> Result<Trace> {
    cfg.validate()?;
    let mut rec = Recorder::start(problem, x0, cfg.stop_tolerance)?;
    for i in 0..cfg.max_outer_iterations {
        if rec.converged() {
            return Ok(rec.finish(TerminalStatus::Converged));
        }
        let next = averaged_point(problem, rec.current())?;
        if next == *rec.current() {
            return Ok(rec.finish(TerminalStatus::MaxIterations));
        }
        rec.push(i, 1, next, StepKind::Averaged, None)?;
    }
    Ok(rec.finish_capped())
}
