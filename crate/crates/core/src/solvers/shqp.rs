//! Supporting-halfspace schemes: basic (block schedule), mass projection and
//! the memory variant that only projects onto the farthest set.

use std::collections::VecDeque;

use super::trace::Recorder;
use super::{
    FallbackPolicy, PairingRule, ProblemInstance, QpMeta, Schedule, SolverConfig, StepKind,
    TerminalStatus, Trace,
};
use crate::polyhedra::{
    halfspace_from_projection, project_onto_polyhedron_warm, Halfspace, Polyhedron, QpStatus, Tag,
};
use crate::{Error, Point, Result};

pub(crate) struct Step {
    pub point: Point,
    pub kind: StepKind,
    pub qp: Option<QpMeta>,
    pub active: Vec<Tag>,
}

/// Projects `x` onto the polyhedron of `constraints`, walking the fallback
/// ladder when it is empty. Returns `None` only under [`FallbackPolicy::Abort`].
pub(crate) fn qp_step(
    problem: &ProblemInstance,
    x: &Point,
    mut constraints: Vec<Halfspace>,
    current_outer: usize,
    policy: FallbackPolicy,
    warm: &[Tag],
) -> Result<Option<Step>> {
    loop {
        let poly = Polyhedron::new(constraints.clone())?;
        let hint: Vec<usize> = constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.tag.is_some_and(|t| warm.contains(&t)))
            .map(|(k, _)| k)
            .collect();
        let qp = project_onto_polyhedron_warm(&poly, x, &hint)?;
        if qp.status == QpStatus::Optimal {
            let active = qp
                .active_set
                .iter()
                .filter_map(|&k| constraints[k].tag)
                .collect();
            return Ok(Some(Step {
                point: qp.point,
                kind: StepKind::QpProjection,
                qp: Some(QpMeta {
                    constraints: constraints.len(),
                    active_size: qp.active_set.len(),
                    kkt_residual: qp.kkt_residual,
                }),
                active,
            }));
        }
        if policy == FallbackPolicy::Abort {
            return Ok(None);
        }
        let oldest_retained = constraints
            .iter()
            .filter_map(|c| c.tag)
            .filter(|t| t.outer < current_outer)
            .map(|t| t.outer)
            .min();
        if let Some(o) = oldest_retained {
            constraints.retain(|c| c.tag.is_none_or(|t| t.outer != o));
            continue;
        }
        if constraints.iter().any(Halfspace::is_equality) {
            constraints = constraints.iter().map(Halfspace::relaxed).collect();
            continue;
        }
        break;
    }
    let distances = problem.distances(x)?;
    let far = argmax_first(&distances);
    let p = problem.sets()[far].project(x)?;
    Ok(Some(Step {
        point: p.nearest,
        kind: StepKind::SetProjection(far),
        qp: None,
        active: Vec::new(),
    }))
}

/// Index of the largest entry, smallest index on ties.
pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// Block-scheduled SHQP with unrelaxed halfspaces (hyperplanes for
/// manifolds). With [`PairingRule::Fixed`] and cyclic blocks every step is a
/// plain projection, matching [`super::run_map`].
pub fn run_basic_shqp(
    problem: &ProblemInstance,
    schedule: &Schedule,
    x0: &Point,
    cfg: &SolverConfig,
) -> Result<Trace> {
    cfg.validate()?;
    let m = problem.set_count();
    if schedule.blocks().iter().flatten().any(|&l| l >= m) {
        return Err(Error::InvalidArgument(
            "schedule refers to a missing set".into(),
        ));
    }
    let mut rec = Recorder::start(problem, x0, cfg.stop_tolerance)?;
    let mut retained: Vec<Halfspace> = Vec::new();
    let mut warm: Vec<Tag> = Vec::new();
    for i in 0..cfg.max_outer_iterations {
        let mut latest: Vec<Option<Halfspace>> = vec![None; m];
        for (j, block) in schedule.blocks().iter().enumerate() {
            if rec.converged() {
                return Ok(rec.finish(TerminalStatus::Converged));
            }
            if block.is_empty() {
                continue;
            }
            let x = rec.current().clone();
            let mut fresh = Vec::new();
            for &l in block {
                let set = &problem.sets()[l];
                let p = set.project(&x)?;
                if p.distance <= cfg.stop_tolerance {
                    continue;
                }
                let tag = Tag {
                    set: l,
                    outer: i,
                    inner: j,
                };
                let h = match halfspace_from_projection(
                    &x,
                    &p.nearest,
                    set.is_manifold(),
                    0.0,
                    Some(tag),
                ) {
                    Ok(h) => h,
                    Err(Error::ZeroGap) => continue,
                    Err(e) => return Err(e),
                };
                latest[l] = Some(h.clone());
                fresh.push((h, p.nearest, l));
            }
            let constraints: Vec<Halfspace> = match schedule.pairing() {
                PairingRule::Fixed => fresh.iter().map(|f| f.0.clone()).collect(),
                PairingRule::Latest => retained
                    .iter()
                    .cloned()
                    .chain(latest.iter().flatten().cloned())
                    .collect(),
            };
            if constraints.is_empty() {
                continue;
            }
            let step = if constraints.len() == 1 && fresh.len() == 1 && constraints[0] == fresh[0].0
            {
                Step {
                    point: fresh[0].1.clone(),
                    kind: StepKind::SetProjection(fresh[0].2),
                    qp: None,
                    active: Vec::new(),
                }
            } else {
                match qp_step(problem, &x, constraints, i, cfg.fallback, &warm)? {
                    Some(s) => s,
                    None => return Ok(rec.finish(TerminalStatus::QpInfeasibleFallbackExhausted)),
                }
            };
            warm = step.active;
            if step.point != x {
                rec.push(i, j + 1, step.point, step.kind, step.qp)?;
            }
        }
        if schedule.pairing() == PairingRule::Latest && cfg.memory > 0 {
            retained.extend(
                latest
                    .into_iter()
                    .flatten()
                    .filter(|h| h.tag.is_some_and(|t| problem.sets()[t.set].is_convex())),
            );
            retained.retain(|h| h.tag.is_some_and(|t| t.outer + cfg.memory > i));
        }
    }
    Ok(rec.finish_capped())
}

/// Every set projected in the first inner step, one QP per outer iteration.
pub fn run_mass_projection(
    problem: &ProblemInstance,
    x0: &Point,
    cfg: &SolverConfig,
) -> Result<Trace> {
    run_basic_shqp(problem, &Schedule::mass(problem.set_count()), x0, cfg)
}

/// Projects onto the farthest set only, turning the projection into a
/// `τ`-relaxed halfspace, and keeps the halfspaces of the last `memory + 1`
/// outer iterations in the QP.
pub fn run_memory_shqp(problem: &ProblemInstance, x0: &Point, cfg: &SolverConfig) -> Result<Trace> {
    cfg.validate()?;
    let mut rec = Recorder::start(problem, x0, cfg.stop_tolerance)?;
    let mut store: VecDeque<Halfspace> = VecDeque::new();
    let mut warm: Vec<Tag> = Vec::new();
    for i in 1..=cfg.max_outer_iterations {
        if rec.converged() {
            return Ok(rec.finish(TerminalStatus::Converged));
        }
        let x = rec.current().clone();
        let far = argmax_first(rec.current_distances());
        let set = &problem.sets()[far];
        let p = set.project(&x)?;
        let tau = cfg.tau_for(i, set);
        let tag = Tag {
            set: far,
            outer: i,
            inner: 0,
        };
        let h = halfspace_from_projection(&x, &p.nearest, false, tau, Some(tag))?;
        store.push_back(h);
        while store
            .front()
            .is_some_and(|c| c.tag.is_some_and(|t| t.outer + cfg.memory < i))
        {
            store.pop_front();
        }
        let step = match qp_step(
            problem,
            &x,
            store.iter().cloned().collect(),
            i,
            cfg.fallback,
            &warm,
        )? {
            Some(s) => s,
            None => return Ok(rec.finish(TerminalStatus::QpInfeasibleFallbackExhausted)),
        };
        if step.kind != StepKind::QpProjection {
            // The ladder discarded the memory; start afresh from this iterate.
            store.clear();
        }
        warm = step.active;
        if step.point != x {
            rec.push(i, 0, step.point, step.kind, step.qp)?;
        }
    }
    Ok(rec.finish_capped())
}
