use super::shqp::qp_step;
use super::trace::Recorder;
use super::{ProblemInstance, SolverConfig, StepKind, TerminalStatus, Trace};
use crate::polyhedra::{Halfspace, Tag};
use crate::{Error, Point, Result};

/// Two-set scheme: project onto `K_1`, then `K_2`; when the angle at the
/// first projection is acute, finish with a QP over the two supporting
/// halfspaces, otherwise keep the second projection (recorded as a copy).
pub fn run_two_shqp(problem: &ProblemInstance, x0: &Point, cfg: &SolverConfig) -> Result<Trace> {
    cfg.validate()?;
    if problem.set_count() != 2 {
        return Err(Error::InvalidArgument(format!(
            "two-step scheme needs exactly 2 sets, got {}",
            problem.set_count()
        )));
    }
    let (k1, k2) = (&problem.sets()[0], &problem.sets()[1]);
    let mut rec = Recorder::start(problem, x0, cfg.stop_tolerance)?;
    for i in 0..cfg.max_outer_iterations {
        if rec.converged() {
            return Ok(rec.finish(TerminalStatus::Converged));
        }
        let x0 = rec.current().clone();
        let x1 = k1.project(&x0)?.nearest;
        if x1 != x0 {
            rec.push(i, 1, x1.clone(), StepKind::SetProjection(0), None)?;
            if rec.converged() {
                return Ok(rec.finish(TerminalStatus::Converged));
            }
        }
        let x2 = k2.project(&x1)?.nearest;
        if x2 != x1 {
            rec.push(i, 2, x2.clone(), StepKind::SetProjection(1), None)?;
            if rec.converged() {
                return Ok(rec.finish(TerminalStatus::Converged));
            }
        }
        let u = &x0 - &x1;
        let v = &x2 - &x1;
        let acute = u.norm() > 1e-14 && v.norm() > 1e-14 && u.dot(&v) > 0.0;
        if !acute {
            rec.push(i, 3, x2, StepKind::Copy, None)?;
            continue;
        }
        let h1 = Halfspace::inequality(u.clone(), u.dot(&x1))?.with_tag(Tag {
            set: 0,
            outer: i,
            inner: 1,
        });
        let w = &x1 - &x2;
        let h2 = Halfspace::inequality(w.clone(), w.dot(&x2))?.with_tag(Tag {
            set: 1,
            outer: i,
            inner: 2,
        });
        match qp_step(problem, &x2, vec![h1, h2], i, cfg.fallback, &[])? {
            Some(step) => {
                if step.point != x2 {
                    rec.push(i, 3, step.point, step.kind, step.qp)?;
                }
            }
            None => return Ok(rec.finish(TerminalStatus::QpInfeasibleFallbackExhausted)),
        }
    }
    Ok(rec.finish_capped())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::SetOracle;
    use approx::assert_abs_diff_eq;

    #[test]
    fn wedge_of_two_halfspaces_is_solved_by_one_qp() {
        // Narrow cone y ≥ 5|x|: plain alternation zig-zags, the QP lands on
        // the apex at once.
        let problem = ProblemInstance::new(vec![
            SetOracle::halfspace(Point::from_vec(vec![5.0, -1.0]), 0.0).unwrap(),
            SetOracle::halfspace(Point::from_vec(vec![-5.0, -1.0]), 0.0).unwrap(),
        ])
        .unwrap();
        let t = run_two_shqp(
            &problem,
            &Point::from_vec(vec![0.2, -1.0]),
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(t.status, TerminalStatus::Converged);
        assert_eq!(t.qp_steps(), 1);
        assert_abs_diff_eq!(t.last_point().norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_three_sets() {
        let h = SetOracle::halfspace(Point::from_vec(vec![1.0]), 0.0).unwrap();
        let problem = ProblemInstance::new(vec![h.clone(), h.clone(), h]).unwrap();
        assert!(run_two_shqp(
            &problem,
            &Point::from_vec(vec![1.0]),
            &SolverConfig::default()
        )
        .is_err());
    }
}
