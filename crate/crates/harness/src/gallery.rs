//! Named problem instances with analytically known constants.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_8, SQRT_2};

use nalgebra::{DMatrix, DVector};
use shqp_core::polyhedra::{Halfspace, Polyhedron};
use shqp_core::sets::{LevelFunction, SetOracle};
use shqp_core::solvers::ProblemInstance;
use shqp_core::{Point, Result};

/// Constants known in closed form at the known solution.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Certified {
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub convex: bool,
    pub sosh: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub problem: ProblemInstance,
    pub default_x0: Point,
    pub certified: Certified,
    pub note: &'static str,
}

pub const NAMES: &[&str] = &[
    "backtrack-example",
    "two-lines-45",
    "two-lines-theta",
    "circle-line",
    "two-parabolas",
    "halfspace-pair",
    "rank1-affine",
    "two-shqp-wedge",
    "union-axes",
    "cusp",
];

fn p(v: &[f64]) -> Point {
    Point::from_row_slice(v)
}

pub fn all() -> Vec<GalleryEntry> {
    NAMES
        .iter()
        .map(|n| entry(n).expect("listed entry").expect("gallery builds"))
        .collect()
}

/// `None` for an unknown name.
pub fn entry(name: &str) -> Option<Result<GalleryEntry>> {
    let built = match name {
        "backtrack-example" => backtrack_example(),
        "two-lines-45" => two_lines("two-lines-45", FRAC_PI_4),
        "two-lines-theta" => two_lines("two-lines-theta", FRAC_PI_3),
        "circle-line" => circle_line(),
        "two-parabolas" => two_parabolas(),
        "halfspace-pair" => halfspace_pair(),
        "rank1-affine" => rank1_affine(),
        "two-shqp-wedge" => two_shqp_wedge(),
        "union-axes" => union_axes(),
        "cusp" => cusp(),
        _ => return None,
    };
    Some(built)
}

fn backtrack_example() -> Result<GalleryEntry> {
    let h1 = Halfspace::inequality(p(&[0.0, 1.0, 0.0]), 0.0)?;
    let h2 = Halfspace::inequality(p(&[1.0 / 3.0, -1.0, 0.0]), -2.0)?;
    let h3 = Halfspace::inequality(p(&[-1.0, -1.0, 1.0]), 0.0)?;
    let k1 = SetOracle::polyhedron(Polyhedron::new(vec![h1.clone()])?)?;
    let k2 = SetOracle::polyhedron(Polyhedron::new(vec![h2.clone(), h3.clone()])?)?;
    let k = SetOracle::polyhedron(Polyhedron::new(vec![h1, h2, h3])?)?;
    Ok(GalleryEntry {
        name: "backtrack-example",
        problem: ProblemInstance::new(vec![k1, k2])?
            .with_intersection(k)?
            .with_known_solution(p(&[-6.0, 0.0, -6.0]))?,
        default_x0: p(&[0.0, 1.0, 0.0]),
        certified: Certified {
            convex: true,
            ..Default::default()
        },
        note: "K1 = {y <= 0}, K2 = {x/3 - y <= -2} ∩ {-x - y + z <= 0}; the first QP step moves away from K2",
    })
}

/// Two lines through the origin at angle `theta`: β = 1/sin(θ/2), η = sin(θ/2).
fn two_lines(name: &'static str, theta: f64) -> Result<GalleryEntry> {
    let half = (theta / 2.0).sin();
    Ok(GalleryEntry {
        name,
        problem: ProblemInstance::new(vec![
            SetOracle::line_through_origin(&[1.0, 0.0])?,
            SetOracle::line_through_origin(&[theta.cos(), theta.sin()])?,
        ])?
        .with_intersection(SetOracle::points(vec![p(&[0.0, 0.0])])?)?
        .with_known_solution(p(&[0.0, 0.0]))?,
        default_x0: p(&[1.0, 0.0]),
        certified: Certified {
            beta: Some(1.0 / half),
            eta: Some(half),
            convex: true,
            sosh: Some(true),
        },
        note: "two subspaces; alternating projections contract by cos²θ per sweep",
    })
}

/// Unit circle and the line x2 = 1/2 crossing at 60 degrees.
fn circle_line() -> Result<GalleryEntry> {
    let s = 3f64.sqrt() / 2.0;
    Ok(GalleryEntry {
        name: "circle-line",
        problem: ProblemInstance::new(vec![
            SetOracle::sphere(p(&[0.0, 0.0]), 1.0)?,
            SetOracle::hyperplane(p(&[0.0, 1.0]), 0.5)?,
        ])?
        .with_intersection(SetOracle::points(vec![p(&[s, 0.5]), p(&[-s, 0.5])])?)?
        .with_known_solution(p(&[s, 0.5]))?,
        default_x0: p(&[s + 0.2, 0.7]),
        certified: Certified {
            beta: Some(2.0),
            eta: Some(0.5),
            convex: false,
            sosh: Some(true),
        },
        note: "smooth manifold meeting a line transversally",
    })
}

/// {x2 >= x1²} ∩ {x2 <= 2 − x1²}, solved at the corner (1, 1).
fn two_parabolas() -> Result<GalleryEntry> {
    let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let lower = SetOracle::level_set(LevelFunction::quadratic(
        q.clone(),
        DVector::from_vec(vec![0.0, -1.0]),
        0.0,
    )?);
    let upper = SetOracle::level_set(LevelFunction::quadratic(
        q,
        DVector::from_vec(vec![0.0, 1.0]),
        -2.0,
    )?);
    let eta = 2.0 / 5f64.sqrt();
    Ok(GalleryEntry {
        name: "two-parabolas",
        problem: ProblemInstance::new(vec![lower.clone(), upper.clone()])?
            .with_intersection(SetOracle::intersection(vec![lower, upper])?)?
            .with_known_solution(p(&[1.0, 1.0]))?,
        default_x0: p(&[1.3, 1.0]),
        certified: Certified {
            beta: Some(1.0 / eta),
            eta: Some(eta),
            convex: true,
            sosh: Some(true),
        },
        note: "C² level sets with nonparallel gradients at the corner",
    })
}

fn halfspace_pair() -> Result<GalleryEntry> {
    let h1 = Halfspace::inequality(p(&[1.0, 0.0]), 0.0)?;
    let h2 = Halfspace::inequality(p(&[0.0, 1.0]), 0.0)?;
    Ok(GalleryEntry {
        name: "halfspace-pair",
        problem: ProblemInstance::new(vec![
            SetOracle::halfspace(p(&[1.0, 0.0]), 0.0)?,
            SetOracle::halfspace(p(&[0.0, 1.0]), 0.0)?,
        ])?
        .with_intersection(SetOracle::polyhedron(Polyhedron::new(vec![h1, h2])?)?)?
        .with_known_solution(p(&[0.0, 0.0]))?,
        default_x0: p(&[1.0, 1.0]),
        certified: Certified {
            beta: Some(SQRT_2),
            eta: Some(1.0 / SQRT_2),
            convex: true,
            sosh: Some(true),
        },
        note: "the nonpositive quadrant",
    })
}

/// 2×2 matrices (row-major) of rank at most one, sliced by fixing three
/// entries of X* = u vᵀ with u = (1, 2), v = (1, 1).
fn rank1_affine() -> Result<GalleryEntry> {
    let xstar = [1.0, 1.0, 2.0, 2.0];
    let selector = DMatrix::from_row_slice(
        3,
        4,
        &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
    );
    let rhs = DVector::from_vec(xstar[..3].to_vec());
    Ok(GalleryEntry {
        name: "rank1-affine",
        problem: ProblemInstance::new(vec![
            SetOracle::fixed_rank(2, 2, 1)?,
            SetOracle::affine(selector, rhs)?,
        ])?
        .with_intersection(SetOracle::points(vec![p(&xstar)])?)?
        .with_known_solution(p(&xstar))?,
        default_x0: p(&[1.1, 0.9, 2.05, 2.3]),
        certified: Certified::default(),
        note: "low-rank completion of one missing entry; the intersection is a single matrix",
    })
}

/// Wedge {x : ⟨n_l, x⟩ <= 0} with interior angle π/4 opening upwards. The
/// angle at the first projection is π/4, so the two-step QP applies.
fn two_shqp_wedge() -> Result<GalleryEntry> {
    let a = 3.0 * FRAC_PI_8;
    let n1 = p(&[a.sin(), -a.cos()]);
    let n2 = p(&[-a.sin(), -a.cos()]);
    let poly = Polyhedron::new(vec![
        Halfspace::inequality(n1.clone(), 0.0)?,
        Halfspace::inequality(n2.clone(), 0.0)?,
    ])?;
    let half = FRAC_PI_8.sin();
    Ok(GalleryEntry {
        name: "two-shqp-wedge",
        problem: ProblemInstance::new(vec![
            SetOracle::halfspace(n1, 0.0)?,
            SetOracle::halfspace(n2, 0.0)?,
        ])?
        .with_intersection(SetOracle::polyhedron(poly)?)?
        .with_known_solution(p(&[0.0, 0.0]))?,
        default_x0: p(&[0.3, -1.0]),
        certified: Certified {
            beta: Some(1.0 / half),
            eta: Some(half),
            convex: true,
            sosh: Some(true),
        },
        note:
            "two convex halfspaces; δ = 0 so the distance-drop hypothesis holds for any acute angle",
    })
}

/// The union of the coordinate axes (not Clarke regular at 0) and the
/// diagonal line.
fn union_axes() -> Result<GalleryEntry> {
    let axes = SetOracle::union(vec![
        SetOracle::line_through_origin(&[1.0, 0.0])?,
        SetOracle::line_through_origin(&[0.0, 1.0])?,
    ])?;
    Ok(GalleryEntry {
        name: "union-axes",
        problem: ProblemInstance::new(vec![axes, SetOracle::line_through_origin(&[1.0, 1.0])?])?
            .with_intersection(SetOracle::points(vec![p(&[0.0, 0.0])])?)?
            .with_known_solution(p(&[0.0, 0.0]))?,
        default_x0: p(&[1.0, 0.3]),
        certified: Certified::default(),
        note: "negative control: the union of the axes is not super-regular at the origin",
    })
}

/// Epigraph of |t|^(3/2) meeting {x2 <= 0} only at the origin.
fn cusp() -> Result<GalleryEntry> {
    let epi = SetOracle::power_epigraph(1.5, 1.0)?;
    let below = SetOracle::halfspace(p(&[0.0, 1.0]), 0.0)?;
    Ok(GalleryEntry {
        name: "cusp",
        problem: ProblemInstance::new(vec![epi, below])?
            .with_intersection(SetOracle::points(vec![p(&[0.0, 0.0])])?)?
            .with_known_solution(p(&[0.0, 0.0]))?,
        default_x0: p(&[0.3, -0.2]),
        certified: Certified {
            convex: true,
            sosh: Some(false),
            ..Default::default()
        },
        note: "boundary curvature blows up at the origin: no second-order supporting hyperplane",
    })
}
