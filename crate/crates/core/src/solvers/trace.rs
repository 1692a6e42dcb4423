use std::fmt;

use super::ProblemInstance;
use crate::{Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Start,
    /// Plain projection onto set `l` (0-based).
    SetProjection(usize),
    QpProjection,
    Averaged,
    LineSearch,
    /// The iterate was carried over unchanged (two-step SHQP, obtuse angle).
    Copy,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Start => write!(f, "start"),
            Self::SetProjection(l) => write!(f, "set-projection-{}", l + 1),
            Self::QpProjection => write!(f, "qp-projection"),
            Self::Averaged => write!(f, "averaged"),
            Self::LineSearch => write!(f, "line-search"),
            Self::Copy => write!(f, "copy"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpMeta {
    pub constraints: usize,
    pub active_size: usize,
    pub kkt_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub outer: usize,
    pub inner: usize,
    pub point: Point,
    pub kind: StepKind,
    pub distances: Vec<f64>,
    pub qp: Option<QpMeta>,
}

impl TraceRecord {
    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.distances.iter().map(|d| d * d).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    Converged,
    MaxIterations,
    QpInfeasibleFallbackExhausted,
}

impl fmt::Display for TerminalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Converged => "converged",
            Self::MaxIterations => "max-iterations",
            Self::QpInfeasibleFallbackExhausted => "qp-infeasible-fallback-exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub status: TerminalStatus,
}

impl Trace {
    pub fn last_point(&self) -> &Point {
        &self.records.last().expect("trace has a start record").point
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The start point followed by the last iterate of every outer iteration.
    pub fn outer_iterates(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for (k, r) in self.records.iter().enumerate() {
            let last_of_outer = self
                .records
                .get(k + 1)
                .is_none_or(|next| next.outer != r.outer || next.kind == StepKind::Start);
            if r.kind == StepKind::Start || last_of_outer {
                out.push(r.point.clone());
            }
        }
        out
    }

    pub fn qp_steps(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.kind == StepKind::QpProjection)
            .count()
    }
}

/// Accumulates records, recomputing distances to every set at record time.
pub(crate) struct Recorder<'a> {
    problem: &'a ProblemInstance,
    tol: f64,
    records: Vec<TraceRecord>,
}

impl<'a> Recorder<'a> {
    pub fn start(problem: &'a ProblemInstance, x0: &Point, tol: f64) -> Result<Self> {
        crate::linalg::check_dim(problem.dimension(), x0)?;
        let mut r = Self {
            problem,
            tol,
            records: Vec::new(),
        };
        r.push(0, 0, x0.clone(), StepKind::Start, None)?;
        Ok(r)
    }

    pub fn push(
        &mut self,
        outer: usize,
        inner: usize,
        point: Point,
        kind: StepKind,
        qp: Option<QpMeta>,
    ) -> Result<()> {
        let distances = self.problem.distances(&point)?;
        self.records.push(TraceRecord {
            outer,
            inner,
            point,
            kind,
            distances,
            qp,
        });
        Ok(())
    }

    pub fn current(&self) -> &Point {
        &self.records.last().expect("start record").point
    }

    pub fn current_distances(&self) -> &[f64] {
        &self.records.last().expect("start record").distances
    }

    pub fn converged(&self) -> bool {
        self.records.last().expect("start record").max_distance() <= self.tol
    }

    pub fn finish(self, status: TerminalStatus) -> Trace {
        Trace {
            records: self.records,
            status,
        }
    }

    /// Closes the trace after the iteration cap, reporting convergence if the
    /// final iterate happens to satisfy the stopping rule.
    pub fn finish_capped(self) -> Trace {
        let status = if self.converged() {
            TerminalStatus::Converged
        } else {
            TerminalStatus::MaxIterations
        };
        self.finish(status)
    }
}
