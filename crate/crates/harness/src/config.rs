//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "problem": "backtrack-example",
//!   "algorithm": "mass",
//!   "x0": [0, 1, 0],
//!   "tau": 0.1, "pbar": 4, "max_iters": 500, "tol": 1e-10,
//!   "outputs": { "dir": "out", "formats": ["csv", "json"] }
//! }
//! ```
//!
//! `problem` is a gallery name or an inline object
//! `{"sets": [...], "known_solution": [...], "intersection": {...}}` whose
//! sets are `{"kind": ..., ...}`. `x0` is a vector or
//! `{"random_ball": {"radius": r}}` around the known solution.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use shqp_core::polyhedra::{ConstraintKind, Halfspace, Polyhedron};
use shqp_core::sets::{LevelFunction, SetOracle};
use shqp_core::solvers::{
    FallbackPolicy, Merit, PairingRule, ProblemInstance, Schedule, SolverConfig, TauSchedule,
};
use shqp_core::Point;

use crate::gallery::{self, Certified};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
}

fn invalid(path: impl Into<String>, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        path: path.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Map,
    BasicShqp,
    Mass,
    MemoryShqp,
    TwoShqp,
    Averaged,
    Global,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Self::Map,
        Self::BasicShqp,
        Self::Mass,
        Self::MemoryShqp,
        Self::TwoShqp,
        Self::Averaged,
        Self::Global,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Map => "map",
            Self::BasicShqp => "basic-shqp",
            Self::Mass => "mass",
            Self::MemoryShqp => "memory-shqp",
            Self::TwoShqp => "two-shqp",
            Self::Averaged => "averaged",
            Self::Global => "global",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetDef {
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Hyperplane {
        normal: Vec<f64>,
        offset: f64,
    },
    Affine {
        matrix: Vec<Vec<f64>>,
        rhs: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Sphere {
        center: Vec<f64>,
        radius: f64,
    },
    LevelSet {
        q: Vec<Vec<f64>>,
        c: Vec<f64>,
        d: f64,
    },
    LevelManifold {
        q: Vec<Vec<f64>>,
        c: Vec<f64>,
        d: f64,
    },
    FixedRank {
        rows: usize,
        cols: usize,
        rank: usize,
    },
    PowerEpigraph {
        exponent: f64,
        scale: f64,
    },
    Union {
        parts: Vec<SetDef>,
    },
    Points {
        points: Vec<Vec<f64>>,
    },
    Polyhedron {
        constraints: Vec<ConstraintDef>,
    },
    Intersection {
        parts: Vec<SetDef>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintDef {
    pub normal: Vec<f64>,
    pub offset: f64,
    #[serde(default)]
    pub equality: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineProblem {
    pub sets: Vec<SetDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_solution: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection: Option<SetDef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemDef {
    Named(String),
    Inline(InlineProblem),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StartDef {
    RandomBall { radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum X0Def {
    Point(Vec<f64>),
    Random(StartDef),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDef {
    /// 1-based set indices per block.
    pub blocks: Vec<Vec<usize>>,
    #[serde(default = "default_pairing")]
    pub pairing: PairingDef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingDef {
    Latest,
    Fixed,
}

fn default_pairing() -> PairingDef {
    PairingDef::Latest
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FallbackDef {
    Ladder,
    Abort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeritDef {
    IntersectionDistance,
    SumOfSquares,
    MaxDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            dir: None,
            formats: default_formats(),
        }
    }
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tau: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pbar: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
}

impl SweepGrid {
    pub fn is_empty(&self) -> bool {
        self.tau.is_empty() && self.pbar.is_empty() && self.seeds.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemDef,
    pub algorithm: Algorithm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<X0Def>,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_true")]
    pub convex_tau_zero: bool,
    #[serde(default = "default_pbar")]
    pub pbar: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleDef>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_fallback")]
    pub fallback: FallbackDef,
    #[serde(default = "default_merit")]
    pub merit: MeritDef,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default, skip_serializing_if = "SweepGrid::is_empty")]
    pub sweep: SweepGrid,
}

fn default_tau() -> f64 {
    0.1
}
fn default_true() -> bool {
    true
}
fn default_pbar() -> usize {
    4
}
fn default_max_iters() -> usize {
    500
}
fn default_tol() -> f64 {
    1e-10
}
fn default_fallback() -> FallbackDef {
    FallbackDef::Ladder
}
fn default_merit() -> MeritDef {
    MeritDef::MaxDistance
}

impl ExperimentConfig {
    pub fn new(problem: ProblemDef, algorithm: Algorithm) -> Self {
        Self {
            problem,
            algorithm,
            x0: None,
            tau: default_tau(),
            convex_tau_zero: true,
            pbar: default_pbar(),
            schedule: None,
            max_iters: default_max_iters(),
            tol: default_tol(),
            fallback: default_fallback(),
            merit: default_merit(),
            rng_seed: 0,
            outputs: Outputs::default(),
            sweep: SweepGrid::default(),
        }
    }

    /// Parses JSON, reporting the JSON path of the first offending field.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            invalid(
                if path == "." {
                    "$".to_string()
                } else {
                    format!("$.{path}")
                },
                e.into_inner(),
            )
        })
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            tau: TauSchedule::Constant(self.tau),
            convex_tau_zero: self.convex_tau_zero,
            memory: self.pbar,
            max_outer_iterations: self.max_iters,
            stop_tolerance: self.tol,
            fallback: match self.fallback {
                FallbackDef::Ladder => FallbackPolicy::Ladder,
                FallbackDef::Abort => FallbackPolicy::Abort,
            },
            rng_seed: self.rng_seed,
        }
    }

    pub fn merit(&self) -> Merit {
        match self.merit {
            MeritDef::IntersectionDistance => Merit::IntersectionDistance,
            MeritDef::SumOfSquares => Merit::SumOfSquares,
            MeritDef::MaxDistance => Merit::MaxDistance,
        }
    }

    /// Builds everything a run needs, checking algorithm-specific rules first.
    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let (problem, default_x0, certified) = match &self.problem {
            ProblemDef::Named(name) => {
                let e = gallery::entry(name)
                    .ok_or_else(|| ConfigError::UnknownProblem(name.clone()))?
                    .map_err(|e| invalid("$.problem", e))?;
                (e.problem, Some(e.default_x0), e.certified)
            }
            ProblemDef::Inline(p) => (build_problem(p)?, None, Certified::default()),
        };
        let m = problem.set_count();
        let n = problem.dimension();
        if !(self.tol > 0.0) {
            return Err(invalid("$.tol", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.tau) {
            return Err(invalid("$.tau", format!("{} outside [0, 1)", self.tau)));
        }
        if self.max_iters == 0 {
            return Err(invalid("$.max_iters", "must be at least 1"));
        }
        match self.algorithm {
            Algorithm::TwoShqp if m != 2 => {
                return Err(invalid(
                    "$.algorithm",
                    format!("two-shqp needs exactly 2 sets, problem has {m}"),
                ))
            }
            Algorithm::MemoryShqp if self.pbar == 0 => {
                return Err(invalid("$.pbar", "memory-shqp needs pbar >= 1"))
            }
            Algorithm::Global
                if self.merit == MeritDef::IntersectionDistance
                    && problem.intersection().is_none() =>
            {
                return Err(invalid(
                    "$.merit",
                    "intersection-distance needs an intersection oracle",
                ))
            }
            _ => {}
        }
        if self.outputs.formats.is_empty() {
            return Err(invalid(
                "$.outputs.formats",
                "at least one format is required",
            ));
        }
        for (k, &t) in self.sweep.tau.iter().enumerate() {
            if !(0.0..1.0).contains(&t) {
                return Err(invalid(
                    format!("$.sweep.tau[{k}]"),
                    format!("{t} outside [0, 1)"),
                ));
            }
        }
        if self.algorithm == Algorithm::MemoryShqp {
            if let Some(k) = self.sweep.pbar.iter().position(|&p| p == 0) {
                return Err(invalid(
                    format!("$.sweep.pbar[{k}]"),
                    "memory-shqp needs pbar >= 1",
                ));
            }
        }
        let schedule = match &self.schedule {
            None => Schedule::cyclic(m, PairingRule::Latest),
            Some(s) => {
                let mut blocks = Vec::new();
                for (b, block) in s.blocks.iter().enumerate() {
                    let mut out = Vec::new();
                    for (k, &l) in block.iter().enumerate() {
                        if l == 0 || l > m {
                            return Err(invalid(
                                format!("$.schedule.blocks[{b}][{k}]"),
                                format!("set index {l} not in 1..={m}"),
                            ));
                        }
                        out.push(l - 1);
                    }
                    blocks.push(out);
                }
                let pairing = match s.pairing {
                    PairingDef::Latest => PairingRule::Latest,
                    PairingDef::Fixed => PairingRule::Fixed,
                };
                Schedule::new(blocks, pairing, m).map_err(|e| invalid("$.schedule", e))?
            }
        };
        let x0 = match &self.x0 {
            Some(X0Def::Point(v)) => {
                if v.len() != n {
                    return Err(invalid(
                        "$.x0",
                        format!("expected {n} entries, got {}", v.len()),
                    ));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(invalid("$.x0", "entries must be finite"));
                }
                StartPoint::Fixed(Point::from_vec(v.clone()))
            }
            Some(X0Def::Random(StartDef::RandomBall { radius })) => {
                if !(*radius > 0.0) {
                    return Err(invalid("$.x0.random_ball.radius", "must be positive"));
                }
                let Some(center) = problem.known_solution() else {
                    return Err(invalid("$.x0", "random_ball needs a known solution"));
                };
                StartPoint::Ball {
                    center: center.clone(),
                    radius: *radius,
                }
            }
            None => match default_x0 {
                Some(x) => StartPoint::Fixed(x),
                None => return Err(invalid("$.x0", "required for inline problems")),
            },
        };
        Ok(Resolved {
            problem,
            schedule,
            x0,
            certified,
        })
    }
}

#[derive(Debug, Clone)]
pub enum StartPoint {
    Fixed(Point),
    Ball { center: Point, radius: f64 },
}

impl StartPoint {
    pub fn draw(&self, seed: u64) -> Point {
        match self {
            Self::Fixed(x) => x.clone(),
            Self::Ball { center, radius } => {
                let mut rng = shqp_core::linalg::seeded_rng(seed);
                shqp_core::linalg::random_in_ball(&mut rng, center, *radius)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Resolved {
    pub problem: ProblemInstance,
    pub schedule: Schedule,
    pub x0: StartPoint,
    pub certified: Certified,
}

fn matrix(path: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>, ConfigError> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(invalid(path, "matrix must be nonempty"));
    }
    if let Some(k) = rows.iter().position(|row| row.len() != c) {
        return Err(invalid(
            format!("{path}[{k}]"),
            format!("expected {c} columns"),
        ));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn point(v: &[f64]) -> Point {
    Point::from_row_slice(v)
}

pub fn build_set(path: &str, def: &SetDef) -> Result<SetOracle, ConfigError> {
    let wrap = |r: shqp_core::Result<SetOracle>| r.map_err(|e| invalid(path, e));
    match def {
        SetDef::Halfspace { normal, offset } => wrap(SetOracle::halfspace(point(normal), *offset)),
        SetDef::Hyperplane { normal, offset } => {
            wrap(SetOracle::hyperplane(point(normal), *offset))
        }
        SetDef::Affine { matrix: rows, rhs } => {
            let a = matrix(&format!("{path}.matrix"), rows)?;
            if rhs.len() != a.nrows() {
                return Err(invalid(
                    format!("{path}.rhs"),
                    format!("expected {} entries", a.nrows()),
                ));
            }
            wrap(SetOracle::affine(a, DVector::from_column_slice(rhs)))
        }
        SetDef::Ball { center, radius } => wrap(SetOracle::ball(point(center), *radius)),
        SetDef::Box { lower, upper } => wrap(SetOracle::boxed(point(lower), point(upper))),
        SetDef::Sphere { center, radius } => wrap(SetOracle::sphere(point(center), *radius)),
        SetDef::LevelSet { q, c, d } | SetDef::LevelManifold { q, c, d } => {
            let qm = matrix(&format!("{path}.q"), q)?;
            let f = LevelFunction::quadratic(qm, DVector::from_column_slice(c), *d)
                .map_err(|e| invalid(path, e))?;
            Ok(if matches!(def, SetDef::LevelSet { .. }) {
                SetOracle::level_set(f)
            } else {
                SetOracle::level_manifold(f)
            })
        }
        SetDef::FixedRank { rows, cols, rank } => wrap(SetOracle::fixed_rank(*rows, *cols, *rank)),
        SetDef::PowerEpigraph { exponent, scale } => {
            wrap(SetOracle::power_epigraph(*exponent, *scale))
        }
        SetDef::Union { parts } | SetDef::Intersection { parts } => {
            let built = parts
                .iter()
                .enumerate()
                .map(|(k, s)| build_set(&format!("{path}.parts[{k}]"), s))
                .collect::<Result<Vec<_>, _>>()?;
            if matches!(def, SetDef::Union { .. }) {
                wrap(SetOracle::union(built))
            } else {
                wrap(SetOracle::intersection(built))
            }
        }
        SetDef::Points { points } => {
            wrap(SetOracle::points(points.iter().map(|p| point(p)).collect()))
        }
        SetDef::Polyhedron { constraints } => {
            let mut hs = Vec::new();
            for (k, c) in constraints.iter().enumerate() {
                let kind = if c.equality {
                    ConstraintKind::Equality
                } else {
                    ConstraintKind::Inequality
                };
                hs.push(
                    Halfspace::new(point(&c.normal), c.offset, kind)
                        .map_err(|e| invalid(format!("{path}.constraints[{k}]"), e))?,
                );
            }
            wrap(Polyhedron::new(hs).and_then(SetOracle::polyhedron))
        }
    }
}

pub fn build_problem(p: &InlineProblem) -> Result<ProblemInstance, ConfigError> {
    let sets = p
        .sets
        .iter()
        .enumerate()
        .map(|(k, s)| build_set(&format!("$.problem.sets[{k}]"), s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut problem = ProblemInstance::new(sets).map_err(|e| invalid("$.problem.sets", e))?;
    if let Some(k) = &p.intersection {
        let oracle = build_set("$.problem.intersection", k)?;
        problem = problem
            .with_intersection(oracle)
            .map_err(|e| invalid("$.problem.intersection", e))?;
    }
    if let Some(x) = &p.known_solution {
        if x.len() != problem.dimension() {
            return Err(invalid(
                "$.problem.known_solution",
                format!("expected {} entries, got {}", problem.dimension(), x.len()),
            ));
        }
        problem = problem
            .with_known_solution(point(x))
            .map_err(|e| invalid("$.problem.known_solution", e))?;
    }
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_problem_defaults() {
        let c =
            ExperimentConfig::from_json(r#"{"problem": "backtrack-example", "algorithm": "mass"}"#)
                .unwrap();
        assert_eq!(c.pbar, 4);
        assert_eq!(c.tol, 1e-10);
        let r = c.resolve().unwrap();
        assert_eq!(r.problem.set_count(), 2);
    }

    #[test]
    fn error_path_points_at_field() {
        let e =
            ExperimentConfig::from_json(r#"{"problem": "x", "algorithm": "mass", "tau": "big"}"#)
                .unwrap_err();
        match e {
            ConfigError::Invalid { path, .. } => assert_eq!(path, "$.tau"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inline_set_error_path() {
        let json = r#"{"problem": {"sets": [{"kind": "halfspace", "normal": [1, 0], "offset": 0},
            {"kind": "ball", "center": [0, 0], "radius": -1}]}, "algorithm": "map", "x0": [1, 1]}"#;
        let e = ExperimentConfig::from_json(json)
            .unwrap()
            .resolve()
            .unwrap_err();
        match e {
            ConfigError::Invalid { path, .. } => assert_eq!(path, "$.problem.sets[1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn two_shqp_needs_two_sets() {
        let mut c = ExperimentConfig::new(
            ProblemDef::Inline(InlineProblem {
                sets: vec![SetDef::Halfspace {
                    normal: vec![1.0],
                    offset: 0.0,
                }],
                known_solution: None,
                intersection: None,
            }),
            Algorithm::TwoShqp,
        );
        c.x0 = Some(X0Def::Point(vec![1.0]));
        assert!(
            matches!(c.resolve(), Err(ConfigError::Invalid { path, .. }) if path == "$.algorithm")
        );
    }

    #[test]
    fn memory_needs_positive_pbar() {
        let mut c = ExperimentConfig::new(
            ProblemDef::Named("circle-line".into()),
            Algorithm::MemoryShqp,
        );
        c.pbar = 0;
        assert!(matches!(c.resolve(), Err(ConfigError::Invalid { path, .. }) if path == "$.pbar"));
    }

    #[test]
    fn unknown_problem() {
        let c = ExperimentConfig::new(ProblemDef::Named("nope".into()), Algorithm::Map);
        assert_eq!(
            c.resolve().unwrap_err(),
            ConfigError::UnknownProblem("nope".into())
        );
    }

    #[test]
    fn random_ball_start_is_seeded() {
        let c = ExperimentConfig::from_json(
            r#"{"problem": "circle-line", "algorithm": "map", "x0": {"random_ball": {"radius": 0.05}}}"#,
        )
        .unwrap();
        let r = c.resolve().unwrap();
        assert_eq!(r.x0.draw(3), r.x0.draw(3));
        assert_ne!(r.x0.draw(3), r.x0.draw(4));
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::new(ProblemDef::Named("circle-line".into()), Algorithm::Global);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }
}
