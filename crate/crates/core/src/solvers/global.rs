//! Safeguarded step: accept the QP point only if it decreases a merit
//! function, otherwise backtrack towards the averaged projection.

use std::collections::VecDeque;

use super::projections::averaged_point;
use super::trace::Recorder;
use super::{ProblemInstance, QpMeta, SolverConfig, StepKind, TerminalStatus, Trace};
use crate::polyhedra::{
    halfspace_from_projection, project_onto_polyhedron, Halfspace, Polyhedron, QpStatus, Tag,
};
use crate::{Error, Point, Result};

/// Halvings tried on the segment between the QP point and the averaged step.
const BISECTIONS: i32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Merit {
    /// `d(x, K)`; needs an intersection oracle.
    IntersectionDistance,
    /// `Σ_l d(x, K_l)²`
    SumOfSquares,
    /// `max_l d(x, K_l)`
    MaxDistance,
}

pub fn merit_value(problem: &ProblemInstance, x: &Point, merit: Merit) -> Result<f64> {
    match merit {
        Merit::IntersectionDistance => problem.intersection_distance(x),
        Merit::SumOfSquares => Ok(problem.distances(x)?.iter().map(|d| d * d).sum()),
        Merit::MaxDistance => problem.max_distance(x),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalStep {
    pub next: Point,
    /// False when no trial point decreased the merit; `next` is then the
    /// averaged projection.
    pub accepted: bool,
    /// Weight on the QP point of the accepted trial.
    pub step_length: f64,
    /// Constraints removed from the polyhedron before acceptance.
    pub dropped: usize,
    pub merit_before: f64,
    pub merit_after: f64,
    pub qp: Option<QpMeta>,
}

/// One safeguarded step from `x` using the polyhedron `poly`.
///
/// The QP point is tried first; while it fails to decrease the merit, the
/// oldest constraint is dropped and the QP re-solved. If that empties the
/// polyhedron, trial points `t·q + (1−t)·a` with `t = ½, ¼, …, 2⁻⁸` are tried,
/// where `q` is the first QP point and `a` the averaged projection.
pub fn global_step(
    problem: &ProblemInstance,
    x: &Point,
    poly: &Polyhedron,
    merit: Merit,
) -> Result<GlobalStep> {
    let before = merit_value(problem, x, merit)?;
    let done = |next: Point, accepted, step_length, dropped, qp| -> Result<GlobalStep> {
        let merit_after = merit_value(problem, &next, merit)?;
        Ok(GlobalStep {
            next,
            accepted,
            step_length,
            dropped,
            merit_before: before,
            merit_after,
            qp,
        })
    };
    if before == 0.0 {
        return done(x.clone(), true, 0.0, 0, None);
    }
    let mut current = poly.clone();
    let mut dropped = 0;
    let mut first: Option<Point> = None;
    while !current.is_empty() {
        let qp = project_onto_polyhedron(&current, x)?;
        if qp.status == QpStatus::Optimal {
            let meta = QpMeta {
                constraints: current.len(),
                active_size: qp.active_set.len(),
                kkt_residual: qp.kkt_residual,
            };
            if merit_value(problem, &qp.point, merit)? < before {
                return done(qp.point, true, 1.0, dropped, Some(meta));
            }
            first.get_or_insert(qp.point);
        }
        let oldest = current.oldest_index().expect("non-empty polyhedron");
        current = current.without(oldest);
        dropped += 1;
    }
    let avg = averaged_point(problem, x)?;
    if let Some(q) = first {
        for k in 1..=BISECTIONS {
            let t = 0.5f64.powi(k);
            let trial = &q * t + &avg * (1.0 - t);
            if merit_value(problem, &trial, merit)? < before {
                return done(trial, true, t, dropped, None);
            }
        }
    }
    done(avg, false, 0.0, dropped, None)
}

/// Every outer iteration adds one relaxed halfspace per violated set, keeps
/// those of the last `memory + 1` iterations, and takes a [`global_step`].
pub fn run_global(
    problem: &ProblemInstance,
    x0: &Point,
    merit: Merit,
    cfg: &SolverConfig,
) -> Result<Trace> {
    cfg.validate()?;
    if merit == Merit::IntersectionDistance && problem.intersection().is_none() {
        return Err(Error::NoIntersectionOracle);
    }
    let mut rec = Recorder::start(problem, x0, cfg.stop_tolerance)?;
    let mut store: VecDeque<Halfspace> = VecDeque::new();
    for i in 1..=cfg.max_outer_iterations {
        if rec.converged() {
            return Ok(rec.finish(TerminalStatus::Converged));
        }
        let x = rec.current().clone();
        for (l, set) in problem.sets().iter().enumerate() {
            let p = set.project(&x)?;
            if p.distance <= cfg.stop_tolerance {
                continue;
            }
            let tag = Tag {
                set: l,
                outer: i,
                inner: 0,
            };
            match halfspace_from_projection(&x, &p.nearest, false, cfg.tau_for(i, set), Some(tag)) {
                Ok(h) => store.push_back(h),
                Err(Error::ZeroGap) => {}
                Err(e) => return Err(e),
            }
        }
        while store
            .front()
            .is_some_and(|c| c.tag.is_some_and(|t| t.outer + cfg.memory < i))
        {
            store.pop_front();
        }
        let poly = Polyhedron::new(store.iter().cloned().collect())?;
        let step = global_step(problem, &x, &poly, merit)?;
        let kind = match (step.accepted, step.step_length == 1.0 && step.dropped == 0) {
            (true, true) => StepKind::QpProjection,
            (true, false) => StepKind::LineSearch,
            (false, _) => StepKind::Averaged,
        };
        if step.next == x {
            return Ok(rec.finish(TerminalStatus::MaxIterations));
        }
        rec.push(i, 0, step.next, kind, step.qp)?;
    }
    Ok(rec.finish_capped())
}
