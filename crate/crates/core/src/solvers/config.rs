use crate::linalg::check_dim;
use crate::sets::SetOracle;
use crate::{Error, Point, Result};

/// The sets `K_1 … K_m` of one feasibility problem.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    sets: Vec<SetOracle>,
    known_solution: Option<Point>,
    intersection: Option<SetOracle>,
}

impl ProblemInstance {
    pub fn new(sets: Vec<SetOracle>) -> Result<Self> {
        let Some(first) = sets.first() else {
            return Err(Error::InvalidArgument(
                "problem needs at least one set".into(),
            ));
        };
        let n = first.dimension();
        for s in &sets {
            if s.dimension() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.dimension(),
                });
            }
        }
        Ok(Self {
            sets,
            known_solution: None,
            intersection: None,
        })
    }

    /// Attaches a point of the intersection; it must lie in every set to 1e-8.
    pub fn with_known_solution(mut self, x: Point) -> Result<Self> {
        check_dim(self.dimension(), &x)?;
        for (l, s) in self.sets.iter().enumerate() {
            let d = s.distance(&x)?;
            if d > 1e-8 {
                return Err(Error::InvalidArgument(format!(
                    "known solution is {d:e} away from set {}",
                    l + 1
                )));
            }
        }
        self.known_solution = Some(x);
        Ok(self)
    }

    pub fn with_intersection(mut self, k: SetOracle) -> Result<Self> {
        if k.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: k.dimension(),
            });
        }
        self.intersection = Some(k);
        Ok(self)
    }

    pub fn sets(&self) -> &[SetOracle] {
        &self.sets
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn dimension(&self) -> usize {
        self.sets[0].dimension()
    }

    pub fn known_solution(&self) -> Option<&Point> {
        self.known_solution.as_ref()
    }

    pub fn intersection(&self) -> Option<&SetOracle> {
        self.intersection.as_ref()
    }

    pub fn distances(&self, x: &Point) -> Result<Vec<f64>> {
        self.sets.iter().map(|s| s.distance(x)).collect()
    }

    pub fn max_distance(&self, x: &Point) -> Result<f64> {
        Ok(self.distances(x)?.into_iter().fold(0.0, f64::max))
    }

    /// `d(x, K)` from the intersection oracle.
    pub fn intersection_distance(&self, x: &Point) -> Result<f64> {
        self.intersection
            .as_ref()
            .ok_or(Error::NoIntersectionOracle)?
            .distance(x)
    }
}

/// How the polyhedron of an inner step pairs halfspaces with sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingRule {
    /// Each set contributes its most recent halfspace of the current outer
    /// iteration; halfspaces of convex sets from the last `memory` outer
    /// iterations are kept as well.
    Latest,
    /// Only the halfspaces generated in the current inner step.
    Fixed,
}

/// Blocks `S_1 … S_m` (0-based set indices) and the pairing rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    blocks: Vec<Vec<usize>>,
    pairing: PairingRule,
}

impl Schedule {
    pub fn new(blocks: Vec<Vec<usize>>, pairing: PairingRule, m: usize) -> Result<Self> {
        let mut covered = vec![false; m];
        for block in &blocks {
            let mut seen = vec![false; m];
            for &l in block {
                if l >= m {
                    return Err(Error::InvalidArgument(format!(
                        "set index {} out of range",
                        l + 1
                    )));
                }
                if seen[l] {
                    return Err(Error::InvalidArgument(format!(
                        "set {} repeated in a block",
                        l + 1
                    )));
                }
                seen[l] = true;
                covered[l] = true;
            }
        }
        if let Some(l) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidArgument(format!(
                "set {} is in no block",
                l + 1
            )));
        }
        Ok(Self { blocks, pairing })
    }

    /// `S_j = {j}`: one projection per inner step.
    pub fn cyclic(m: usize, pairing: PairingRule) -> Self {
        Self {
            blocks: (0..m).map(|j| vec![j]).collect(),
            pairing,
        }
    }

    /// `S_1 = {1, …, m}`, all other blocks empty.
    pub fn mass(m: usize) -> Self {
        let mut blocks = vec![Vec::new(); m];
        blocks[0] = (0..m).collect();
        Self {
            blocks,
            pairing: PairingRule::Latest,
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn pairing(&self) -> PairingRule {
        self.pairing
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TauSchedule {
    Constant(f64),
    /// `τ_i = initial · ratio^(i−1)`
    Geometric {
        initial: f64,
        ratio: f64,
    },
}

impl TauSchedule {
    pub fn at(&self, iteration: usize) -> f64 {
        match *self {
            Self::Constant(t) => t,
            Self::Geometric { initial, ratio } => {
                initial * ratio.powi(iteration.saturating_sub(1) as i32)
            }
        }
    }
}

/// What to do when the polyhedron of a QP step is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallbackPolicy {
    /// Drop the oldest retained constraints, then relax equalities, then take
    /// a plain projection onto the farthest set.
    Ladder,
    /// Stop with `QpInfeasibleFallbackExhausted`.
    Abort,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tau: TauSchedule,
    /// Use `τ = 0` for halfspaces generated by convex sets.
    pub convex_tau_zero: bool,
    /// Memory depth `p̄`: outer iterations whose halfspaces stay in the QP.
    pub memory: usize,
    pub max_outer_iterations: usize,
    pub stop_tolerance: f64,
    pub fallback: FallbackPolicy,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau: TauSchedule::Constant(0.1),
            convex_tau_zero: true,
            memory: 4,
            max_outer_iterations: 500,
            stop_tolerance: 1e-10,
            fallback: FallbackPolicy::Ladder,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.stop_tolerance > 0.0) {
            return Err(Error::InvalidArgument(
                "stop tolerance must be positive".into(),
            ));
        }
        for i in 1..=3 {
            let t = self.tau.at(i);
            if !(0.0..1.0).contains(&t) {
                return Err(Error::InvalidArgument(format!("tau {t} outside [0, 1)")));
            }
        }
        Ok(())
    }

    pub(crate) fn tau_for(&self, iteration: usize, set: &SetOracle) -> f64 {
        if self.convex_tau_zero && set.is_convex() {
            0.0
        } else {
            self.tau.at(iteration)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_must_cover_every_set() {
        assert!(Schedule::new(vec![vec![0], vec![]], PairingRule::Fixed, 2).is_err());
        assert!(Schedule::new(vec![vec![0, 0], vec![1]], PairingRule::Fixed, 2).is_err());
        assert!(Schedule::new(vec![vec![1], vec![0]], PairingRule::Fixed, 2).is_ok());
        assert!(Schedule::new(vec![vec![2]], PairingRule::Fixed, 2).is_err());
    }

    #[test]
    fn known_solution_must_be_feasible() {
        let k = SetOracle::halfspace(Point::from_vec(vec![1.0, 0.0]), 0.0).unwrap();
        let p = ProblemInstance::new(vec![k]).unwrap();
        assert!(p
            .clone()
            .with_known_solution(Point::from_vec(vec![1.0, 0.0]))
            .is_err());
        assert!(p
            .with_known_solution(Point::from_vec(vec![-1.0, 0.0]))
            .is_ok());
    }

    #[test]
    fn geometric_tau() {
        let t = TauSchedule::Geometric {
            initial: 0.2,
            ratio: 0.5,
        };
        assert_eq!(t.at(1), 0.2);
        assert_eq!(t.at(3), 0.05);
    }
}
