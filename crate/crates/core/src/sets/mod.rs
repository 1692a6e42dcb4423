//! Projection oracles for the closed sets `K_l`, and sampling-based checks of
//! the regularity properties the solvers rely on.

mod level;
mod samplers;

pub use level::LevelFunction;
pub use samplers::{
    check_sosh, check_super_regular, check_supporting_hyperplane, shrink_until_supporting,
    SamplerOutcome,
};

use nalgebra::{DMatrix, DVector};

use crate::linalg::{check_dim, nearest_with_tiebreak};
use crate::polyhedra::{project_onto_polyhedron, Halfspace, Polyhedron, QpStatus};
use crate::{Error, Point, Result};

/// Membership tolerance for sets with closed-form projections.
pub const ANALYTIC_TOL: f64 = 1e-10;
/// Membership tolerance for sets projected by an inner iteration.
pub const ITERATIVE_TOL: f64 = 1e-8;

const TIE_TOL: f64 = 1e-12;
const DYKSTRA_MAX_CYCLES: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    /// `{x : ⟨a, x⟩ ≤ b}`
    Halfspace {
        normal: Point,
        offset: f64,
    },
    /// `{x : ⟨a, x⟩ = b}`
    Hyperplane {
        normal: Point,
        offset: f64,
    },
    /// `{x : A x = b}` with the pseudo-inverse of `A` cached.
    Affine {
        matrix: DMatrix<f64>,
        rhs: DVector<f64>,
        pinv: DMatrix<f64>,
    },
    Ball {
        center: Point,
        radius: f64,
    },
    Box {
        lower: Point,
        upper: Point,
    },
    Sphere {
        center: Point,
        radius: f64,
    },
    /// `{x : f(x) ≤ 0}`
    LevelSet(LevelFunction),
    /// `{x : f(x) = 0}`
    LevelManifold(LevelFunction),
    /// `p × q` matrices of rank at most `rank`, vectorised row-major.
    FixedRank {
        rows: usize,
        cols: usize,
        rank: usize,
    },
    /// `{x ∈ ℝ² : x₂ ≥ scale·|x₁|^exponent}`
    PowerEpigraph {
        exponent: f64,
        scale: f64,
    },
    Union(Vec<SetOracle>),
    Points(Vec<Point>),
    Polyhedron(Polyhedron),
    /// Intersection of the components, projected by Dykstra's iteration.
    Intersection(Vec<SetOracle>),
}

/// A closed set reachable through its projection map.
#[derive(Debug, Clone, PartialEq)]
pub struct SetOracle {
    kind: SetKind,
    dimension: usize,
    is_manifold: bool,
    is_convex: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub nearest: Point,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalProvenance {
    ProjectionResidual,
    AnalyticGradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalSample {
    pub base: Point,
    pub direction: Point,
    pub provenance: NormalProvenance,
}

fn vec_of(v: &[f64]) -> Point {
    Point::from_row_slice(v)
}

impl SetOracle {
    fn build(kind: SetKind, dimension: usize, is_manifold: bool, is_convex: bool) -> Self {
        Self {
            kind,
            dimension,
            is_manifold,
            is_convex,
        }
    }

    pub fn halfspace(normal: Point, offset: f64) -> Result<Self> {
        Halfspace::inequality(normal.clone(), offset)?;
        let n = normal.len();
        Ok(Self::build(
            SetKind::Halfspace { normal, offset },
            n,
            false,
            true,
        ))
    }

    pub fn hyperplane(normal: Point, offset: f64) -> Result<Self> {
        Halfspace::equality(normal.clone(), offset)?;
        let n = normal.len();
        Ok(Self::build(
            SetKind::Hyperplane { normal, offset },
            n,
            true,
            true,
        ))
    }

    /// `{x : A x = b}`; `A` must have full row rank.
    pub fn affine(matrix: DMatrix<f64>, rhs: DVector<f64>) -> Result<Self> {
        if matrix.nrows() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: rhs.len(),
            });
        }
        let rank = matrix.rank(1e-12);
        if rank < matrix.nrows() {
            return Err(Error::InvalidArgument(
                "affine constraint matrix is rank deficient".into(),
            ));
        }
        let pinv = matrix
            .clone()
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let n = matrix.ncols();
        Ok(Self::build(
            SetKind::Affine { matrix, rhs, pinv },
            n,
            true,
            true,
        ))
    }

    /// The line `{t·direction}` through the origin in `ℝ²` (or any dimension).
    pub fn line_through_origin(direction: &[f64]) -> Result<Self> {
        let d = vec_of(direction);
        let n = d.len();
        if n == 2 {
            return Self::hyperplane(vec_of(&[-d[1], d[0]]), 0.0);
        }
        let u = &d / d.norm();
        let proj = DMatrix::identity(n, n) - &u * u.transpose();
        // Rows of I − uuᵀ span the orthogonal complement; keep an independent subset.
        let svd = proj.svd(true, false);
        let rows: Vec<_> = svd
            .u
            .expect("svd u")
            .column_iter()
            .zip(svd.singular_values.iter())
            .filter(|(_, s)| **s > 0.5)
            .map(|(c, _)| c.transpose())
            .collect();
        Self::affine(DMatrix::from_rows(&rows), DVector::zeros(n - 1))
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::InvalidArgument(
                "ball radius must be nonnegative".into(),
            ));
        }
        let n = center.len();
        Ok(Self::build(
            SetKind::Ball { center, radius },
            n,
            false,
            true,
        ))
    }

    pub fn boxed(lower: Point, upper: Point) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
            return Err(Error::InvalidArgument("box has lower > upper".into()));
        }
        let n = lower.len();
        Ok(Self::build(SetKind::Box { lower, upper }, n, false, true))
    }

    pub fn sphere(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(
                "sphere radius must be positive".into(),
            ));
        }
        let n = center.len();
        Ok(Self::build(
            SetKind::Sphere { center, radius },
            n,
            true,
            false,
        ))
    }

    pub fn level_set(f: LevelFunction) -> Self {
        let n = f.dimension();
        let convex = f.is_convex();
        Self::build(SetKind::LevelSet(f), n, false, convex)
    }

    pub fn level_manifold(f: LevelFunction) -> Self {
        let n = f.dimension();
        let affine = f.is_affine();
        Self::build(SetKind::LevelManifold(f), n, true, affine)
    }

    pub fn fixed_rank(rows: usize, cols: usize, rank: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || rank > rows.min(cols) {
            return Err(Error::InvalidArgument(format!(
                "rank {rank} invalid for {rows}x{cols} matrices"
            )));
        }
        let full = rank == rows.min(cols);
        Ok(Self::build(
            SetKind::FixedRank { rows, cols, rank },
            rows * cols,
            true,
            full,
        ))
    }

    pub fn power_epigraph(exponent: f64, scale: f64) -> Result<Self> {
        if !(exponent > 0.0) || !(scale > 0.0) {
            return Err(Error::InvalidArgument(
                "power epigraph needs positive exponent and scale".into(),
            ));
        }
        Ok(Self::build(
            SetKind::PowerEpigraph { exponent, scale },
            2,
            false,
            exponent >= 1.0,
        ))
    }

    pub fn union(parts: Vec<SetOracle>) -> Result<Self> {
        let n = common_dimension(&parts)?;
        let single = parts.len() == 1;
        let (manifold, convex) = if single {
            (parts[0].is_manifold, parts[0].is_convex)
        } else {
            (false, false)
        };
        Ok(Self::build(SetKind::Union(parts), n, manifold, convex))
    }

    pub fn points(points: Vec<Point>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidArgument("point set is empty".into()));
        };
        let n = first.len();
        for p in &points {
            check_dim(n, p)?;
        }
        let convex = points.len() == 1;
        Ok(Self::build(SetKind::Points(points), n, false, convex))
    }

    pub fn polyhedron(poly: Polyhedron) -> Result<Self> {
        let Some(n) = poly.dimension() else {
            return Err(Error::InvalidArgument(
                "polyhedron has no constraints".into(),
            ));
        };
        let manifold = poly.constraints().iter().all(Halfspace::is_equality);
        Ok(Self::build(SetKind::Polyhedron(poly), n, manifold, true))
    }

    pub fn intersection(parts: Vec<SetOracle>) -> Result<Self> {
        let n = common_dimension(&parts)?;
        let manifold = parts.iter().all(|p| p.is_manifold);
        let convex = parts.iter().all(|p| p.is_convex);
        Ok(Self::build(
            SetKind::Intersection(parts),
            n,
            manifold,
            convex,
        ))
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            SetKind::Halfspace { .. } => "halfspace",
            SetKind::Hyperplane { .. } => "hyperplane",
            SetKind::Affine { .. } => "affine-subspace",
            SetKind::Ball { .. } => "ball",
            SetKind::Box { .. } => "box",
            SetKind::Sphere { .. } => "sphere",
            SetKind::LevelSet(_) => "smooth-level-set",
            SetKind::LevelManifold(_) => "smooth-manifold",
            SetKind::FixedRank { .. } => "fixed-rank-matrix-set",
            SetKind::PowerEpigraph { .. } => "power-epigraph",
            SetKind::Union(_) => "finite-union-of-convex",
            SetKind::Points(_) => "point-set",
            SetKind::Polyhedron(_) => "polyhedron",
            SetKind::Intersection(_) => "intersection",
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_manifold(&self) -> bool {
        self.is_manifold
    }

    pub fn is_convex(&self) -> bool {
        self.is_convex
    }

    /// Overrides the convexity flag (for level sets whose convexity is known
    /// from outside the quadratic form, or to treat a set as nonconvex).
    pub fn with_convex(mut self, convex: bool) -> Self {
        self.is_convex = convex;
        self
    }

    pub fn membership_tolerance(&self) -> f64 {
        match &self.kind {
            SetKind::LevelSet(_)
            | SetKind::LevelManifold(_)
            | SetKind::PowerEpigraph { .. }
            | SetKind::Intersection(_) => ITERATIVE_TOL,
            SetKind::Union(parts) => parts
                .iter()
                .map(SetOracle::membership_tolerance)
                .fold(ANALYTIC_TOL, f64::max),
            _ => ANALYTIC_TOL,
        }
    }

    /// How far `x` is from satisfying the set's defining relations.
    pub fn membership_residual(&self, x: &Point) -> f64 {
        match &self.kind {
            SetKind::Halfspace { normal, offset } => {
                ((normal.dot(x) - offset) / normal.norm()).max(0.0)
            }
            SetKind::Hyperplane { normal, offset } => {
                ((normal.dot(x) - offset) / normal.norm()).abs()
            }
            SetKind::Affine { matrix, rhs, .. } => (matrix * x - rhs).amax(),
            SetKind::Ball { center, radius } => ((x - center).norm() - radius).max(0.0),
            SetKind::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .map(|(v, (l, u))| (l - v).max(v - u).max(0.0))
                .fold(0.0, f64::max),
            SetKind::Sphere { center, radius } => ((x - center).norm() - radius).abs(),
            SetKind::LevelSet(f) => f.value(x).max(0.0) / f.gradient(x).norm().max(1.0),
            SetKind::LevelManifold(f) => f.value(x).abs() / f.gradient(x).norm().max(1.0),
            SetKind::FixedRank { rows, cols, rank } => {
                let sv = singular_values(&as_matrix(x, *rows, *cols));
                sv.iter().skip(*rank).map(|s| s * s).sum::<f64>().sqrt()
            }
            SetKind::PowerEpigraph { exponent, scale } => {
                (scale * x[0].abs().powf(*exponent) - x[1]).max(0.0)
            }
            SetKind::Union(parts) => parts
                .iter()
                .map(|p| p.membership_residual(x))
                .fold(f64::INFINITY, f64::min),
            SetKind::Points(pts) => pts
                .iter()
                .map(|p| (x - p).norm())
                .fold(f64::INFINITY, f64::min),
            SetKind::Polyhedron(poly) => poly.max_violation(x),
            SetKind::Intersection(parts) => parts
                .iter()
                .map(|p| p.membership_residual(x))
                .fold(0.0, f64::max),
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.membership_residual(x) <= self.membership_tolerance()
    }

    /// Nearest point of the set to `x` and the distance to it. Set-valued
    /// projections resolve to the lexicographically smallest candidate.
    pub fn project(&self, x: &Point) -> Result<Projection> {
        check_dim(self.dimension, x)?;
        let nearest = self.nearest(x)?;
        let distance = (x - &nearest).norm();
        Ok(Projection { nearest, distance })
    }

    pub fn distance(&self, x: &Point) -> Result<f64> {
        Ok(self.project(x)?.distance)
    }

    fn nearest(&self, x: &Point) -> Result<Point> {
        Ok(match &self.kind {
            SetKind::Halfspace { normal, offset } => {
                let s = normal.dot(x) - offset;
                if s > 0.0 {
                    x - normal * (s / normal.norm_squared())
                } else {
                    x.clone()
                }
            }
            SetKind::Hyperplane { normal, offset } => {
                let s = normal.dot(x) - offset;
                if s != 0.0 {
                    x - normal * (s / normal.norm_squared())
                } else {
                    x.clone()
                }
            }
            SetKind::Affine { matrix, rhs, pinv } => {
                let r = matrix * x - rhs;
                if r.amax() == 0.0 {
                    x.clone()
                } else {
                    x - pinv * r
                }
            }
            SetKind::Ball { center, radius } => {
                let d = x - center;
                let norm = d.norm();
                if norm <= *radius {
                    x.clone()
                } else {
                    center + d * (radius / norm)
                }
            }
            SetKind::Box { lower, upper } => {
                Point::from_fn(x.len(), |i, _| x[i].clamp(lower[i], upper[i]))
            }
            SetKind::Sphere { center, radius } => {
                let d = x - center;
                let norm = d.norm();
                if norm == 0.0 {
                    let mut p = center.clone();
                    p[0] -= radius;
                    p
                } else {
                    center + d * (radius / norm)
                }
            }
            SetKind::LevelSet(f) => {
                if f.value(x) <= 0.0 {
                    x.clone()
                } else {
                    f.project_to_zero_set(x)?.0
                }
            }
            SetKind::LevelManifold(f) => {
                if f.value(x) == 0.0 {
                    x.clone()
                } else {
                    f.project_to_zero_set(x)?.0
                }
            }
            SetKind::FixedRank { rows, cols, rank } => project_fixed_rank(x, *rows, *cols, *rank),
            SetKind::PowerEpigraph { exponent, scale } => {
                project_power_epigraph(x, *exponent, *scale)
            }
            SetKind::Union(parts) => {
                let cands = parts
                    .iter()
                    .map(|p| p.nearest(x))
                    .collect::<Result<Vec<_>>>()?;
                nearest_with_tiebreak(x, cands, TIE_TOL * (1.0 + x.norm())).expect("nonempty union")
            }
            SetKind::Points(pts) => {
                nearest_with_tiebreak(x, pts.clone(), TIE_TOL * (1.0 + x.norm()))
                    .expect("nonempty point set")
            }
            SetKind::Polyhedron(poly) => {
                let r = project_onto_polyhedron(poly, x)?;
                if r.status == QpStatus::Infeasible {
                    return Err(Error::InvalidArgument("polyhedron set is empty".into()));
                }
                r.point
            }
            SetKind::Intersection(parts) => dykstra(parts, x)?,
        })
    }

    /// A unit normal to the set at `base`. Level sets report their analytic
    /// gradient; every other kind uses the projection residual `hint − base`.
    pub fn normal_at(&self, base: &Point, hint: &Point) -> Result<NormalSample> {
        check_dim(self.dimension, base)?;
        check_dim(self.dimension, hint)?;
        let residual = hint - base;
        if residual.norm() <= 1e-14 {
            return Err(Error::DegenerateNormal);
        }
        let analytic = match &self.kind {
            SetKind::LevelSet(f) => Some((f.gradient(base), false)),
            SetKind::LevelManifold(f) => Some((f.gradient(base), true)),
            _ => None,
        };
        if let Some((g, two_sided)) = analytic {
            let norm = g.norm();
            if norm > 1e-14 {
                let mut direction = g / norm;
                if two_sided && direction.dot(&residual) < 0.0 {
                    direction = -direction;
                }
                return Ok(NormalSample {
                    base: base.clone(),
                    direction,
                    provenance: NormalProvenance::AnalyticGradient,
                });
            }
        }
        let norm = residual.norm();
        Ok(NormalSample {
            base: base.clone(),
            direction: residual / norm,
            provenance: NormalProvenance::ProjectionResidual,
        })
    }
}

fn common_dimension(parts: &[SetOracle]) -> Result<usize> {
    let Some(first) = parts.first() else {
        return Err(Error::InvalidArgument(
            "need at least one component set".into(),
        ));
    };
    let n = first.dimension;
    for p in parts {
        if p.dimension != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.dimension,
            });
        }
    }
    Ok(n)
}

fn as_matrix(x: &Point, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, x.as_slice())
}

fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Truncated SVD: keep the `rank` largest singular triplets, earlier index
/// first on ties.
/// Truncated SVD through the symmetric eigenproblem of `[0 M; Mᵀ 0]`, whose
/// eigenpairs `(σ, (u; v)/√2)` stay accurate when the trailing singular
/// values are tiny (the bidiagonal SVD loses the singular vectors there).
fn project_fixed_rank(x: &Point, rows: usize, cols: usize, rank: usize) -> Point {
    let m = as_matrix(x, rows, cols);
    let mut aug = DMatrix::zeros(rows + cols, rows + cols);
    aug.view_mut((0, rows), (rows, cols)).copy_from(&m);
    aug.view_mut((rows, 0), (cols, rows))
        .copy_from(&m.transpose());
    let eig = aug.symmetric_eigen();
    let mut order: Vec<usize> = (0..rows + cols).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let mut out = DMatrix::zeros(rows, cols);
    for &k in order.iter().take(rank) {
        let sigma = eig.eigenvalues[k];
        if sigma <= 0.0 {
            break;
        }
        let w = eig.eigenvectors.column(k);
        out += w.rows(0, rows) * w.rows(rows, cols).transpose() * (2.0 * sigma);
    }
    Point::from_iterator(rows * cols, out.transpose().iter().copied())
}

/// Nearest point of `{x₂ ≥ c|x₁|^p}`: a bracketed 1-D search over the
/// boundary parameter followed by Newton polishing.
fn project_power_epigraph(x: &Point, p: f64, c: f64) -> Point {
    let (x1, x2) = (x[0], x[1]);
    let h = |t: f64| c * t.abs().powf(p);
    if x2 >= h(x1) {
        return x.clone();
    }
    let g = |t: f64| (t - x1).powi(2) + (h(t) - x2).powi(2);
    let reach = h(x1) - x2;
    let (lo, hi) = (x1 - reach, x1 + reach);
    const GRID: usize = 4000;
    let step = (hi - lo) / GRID as f64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..=GRID {
        let v = g(lo + step * i as f64);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut a = lo + step * (best_i.saturating_sub(1)) as f64;
    let mut b = lo + step * (best_i + 1).min(GRID) as f64;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c1 = b - (b - a) * inv_phi;
    let mut c2 = a + (b - a) * inv_phi;
    let (mut g1, mut g2) = (g(c1), g(c2));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if g1 <= g2 {
            b = c2;
            c2 = c1;
            g2 = g1;
            c1 = b - (b - a) * inv_phi;
            g1 = g(c1);
        } else {
            a = c1;
            c1 = c2;
            g1 = g2;
            c2 = a + (b - a) * inv_phi;
            g2 = g(c2);
        }
    }
    let mut t = 0.5 * (a + b);
    // Newton polish on g'(t) = 0 away from the kink at the origin.
    for _ in 0..8 {
        if t == 0.0 {
            break;
        }
        let s = t.signum();
        let ht = h(t);
        let d1 = c * p * s * t.abs().powf(p - 1.0);
        let d2 = c * p * (p - 1.0) * t.abs().powf(p - 2.0);
        let gp = 2.0 * (t - x1) + 2.0 * (ht - x2) * d1;
        let gpp = 2.0 + 2.0 * d1 * d1 + 2.0 * (ht - x2) * d2;
        if !(gpp > 0.0) {
            break;
        }
        let cand = t - gp / gpp;
        if cand.signum() != s || !(g(cand) <= g(t)) {
            break;
        }
        t = cand;
    }
    let cands = [t, 0.0];
    let pick = cands
        .iter()
        .copied()
        .min_by(|&u, &v| g(u).total_cmp(&g(v)).then(u.total_cmp(&v)))
        .unwrap();
    vec_of(&[pick, h(pick)])
}

/// Dykstra's alternating projection with correction terms. Converges to the
/// nearest point for convex components; for nonconvex components it is a
/// local refinement.
fn dykstra(parts: &[SetOracle], x: &Point) -> Result<Point> {
    if parts.iter().all(|p| p.contains(x)) {
        return Ok(x.clone());
    }
    let n = x.len();
    let mut y = x.clone();
    let mut corrections = vec![Point::zeros(n); parts.len()];
    let mut last_change = f64::INFINITY;
    for _ in 0..DYKSTRA_MAX_CYCLES {
        let start = y.clone();
        for (part, corr) in parts.iter().zip(corrections.iter_mut()) {
            let shifted = &y + &*corr;
            let z = part.nearest(&shifted)?;
            *corr = shifted - &z;
            y = z;
        }
        last_change = (&y - &start).norm();
        let feasible = parts.iter().all(|p| p.membership_residual(&y) <= 1e-12);
        if feasible && last_change <= 1e-15 * (1.0 + y.norm()) {
            return Ok(y);
        }
    }
    if parts
        .iter()
        .all(|p| p.membership_residual(&y) <= ITERATIVE_TOL)
    {
        return Ok(y);
    }
    Err(Error::ProjectionNotConverged {
        iterations: DYKSTRA_MAX_CYCLES,
        residual: last_change,
        last_iterate: y.iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(v: &[f64]) -> Point {
        vec_of(v)
    }

    #[test]
    fn halfspace_projection_example() {
        let k = SetOracle::halfspace(p(&[0.0, 1.0, 0.0]), 0.0).unwrap();
        let r = k.project(&p(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(r.nearest, p(&[0.0, 0.0, 0.0]));
        assert_eq!(r.distance, 1.0);
    }

    #[test]
    fn member_projects_to_itself() {
        let k = SetOracle::ball(p(&[0.0, 0.0]), 2.0).unwrap();
        let x = p(&[0.5, -1.0]);
        let r = k.project(&x).unwrap();
        assert_eq!(r.nearest, x);
        assert_eq!(r.distance, 0.0);
    }

    #[test]
    fn circle_radial_projection() {
        let k = SetOracle::sphere(p(&[0.0, 0.0]), 1.0).unwrap();
        let r = k.project(&p(&[2.0, 0.0])).unwrap();
        assert_eq!(r.nearest, p(&[1.0, 0.0]));
        assert_eq!(r.distance, 1.0);
    }

    #[test]
    fn sphere_center_tie_break() {
        let k = SetOracle::sphere(p(&[1.0, 1.0]), 2.0).unwrap();
        let r = k.project(&p(&[1.0, 1.0])).unwrap();
        assert_eq!(r.nearest, p(&[-1.0, 1.0]));
    }

    #[test]
    fn two_point_midpoint_tie_break() {
        let k = SetOracle::points(vec![p(&[1.0, 0.0]), p(&[-1.0, 0.0])]).unwrap();
        assert_eq!(k.project(&p(&[0.0, 3.0])).unwrap().nearest, p(&[-1.0, 0.0]));
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let k = SetOracle::sphere(p(&[0.0, 0.0]), 1.0).unwrap();
        assert!(matches!(
            k.project(&p(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }

    #[test]
    fn normals_from_residuals_and_gradients() {
        let h = SetOracle::halfspace(p(&[0.0, 1.0, 0.0]), 0.0).unwrap();
        let n = h
            .normal_at(&p(&[0.0, 0.0, 0.0]), &p(&[0.0, 1.0, 0.0]))
            .unwrap();
        assert_eq!(n.direction, p(&[0.0, 1.0, 0.0]));
        assert_eq!(n.provenance, NormalProvenance::ProjectionResidual);

        let c = SetOracle::sphere(p(&[0.0, 0.0]), 1.0).unwrap();
        let n = c.normal_at(&p(&[1.0, 0.0]), &p(&[2.0, 0.0])).unwrap();
        assert_eq!(n.direction, p(&[1.0, 0.0]));

        assert_eq!(
            c.normal_at(&p(&[1.0, 0.0]), &p(&[1.0, 0.0])),
            Err(Error::DegenerateNormal)
        );
    }

    #[test]
    fn parabola_gradient_normal_matches_nearby_residual() {
        // f(x) = x₂ − x₁²
        let f = LevelFunction::quadratic(
            DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0]),
            0.0,
        )
        .unwrap();
        let k = SetOracle::level_manifold(f);
        let base = p(&[1.0, 1.0]);
        let expected = p(&[-2.0, 1.0]) / 5f64.sqrt();
        let off = &base + &expected * 1e-3;
        let n = k.normal_at(&base, &off).unwrap();
        assert_eq!(n.provenance, NormalProvenance::AnalyticGradient);
        assert!((&n.direction - &expected).norm() < 1e-14);
        // Independent route: the residual of projecting a nearby off-set point.
        let proj = k.project(&off).unwrap();
        assert!((&proj.nearest - &base).norm() < 1e-9);
        let resid = (&off - &proj.nearest) / proj.distance;
        assert!((resid - expected).norm() < 1e-8);
    }

    #[test]
    fn fixed_rank_keeps_leading_triplet() {
        let k = SetOracle::fixed_rank(2, 2, 1).unwrap();
        let x = p(&[3.0, 0.0, 0.0, 1.0]);
        let r = k.project(&x).unwrap();
        assert!((r.nearest - p(&[3.0, 0.0, 0.0, 0.0])).norm() < 1e-12);
        assert_abs_diff_eq!(r.distance, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn power_epigraph_boundary_projection() {
        let k = SetOracle::power_epigraph(1.5, 1.0).unwrap();
        let x = p(&[0.3, -0.2]);
        let r = k.project(&x).unwrap();
        assert!(k.membership_residual(&r.nearest) <= 1e-12);
        // Dense brute force over the boundary.
        let brute = (0..=200_000)
            .map(|i| {
                let t = -1.0 + 2.0 * i as f64 / 200_000.0;
                ((t - 0.3f64).powi(2) + (t.abs().powf(1.5) + 0.2).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(r.distance <= brute + 1e-12);
        assert!(r.distance >= brute - 1e-8);
    }

    #[test]
    fn dykstra_projects_onto_box_and_halfspace() {
        let k = SetOracle::intersection(vec![
            SetOracle::boxed(p(&[-1.0, -1.0]), p(&[1.0, 1.0])).unwrap(),
            SetOracle::halfspace(p(&[1.0, 1.0]), 0.0).unwrap(),
        ])
        .unwrap();
        let r = k.project(&p(&[2.0, 1.5])).unwrap();
        // The exact answer is the QP projection onto the same constraints.
        let poly = Polyhedron::new(vec![
            Halfspace::inequality(p(&[1.0, 0.0]), 1.0).unwrap(),
            Halfspace::inequality(p(&[-1.0, 0.0]), 1.0).unwrap(),
            Halfspace::inequality(p(&[0.0, 1.0]), 1.0).unwrap(),
            Halfspace::inequality(p(&[0.0, -1.0]), 1.0).unwrap(),
            Halfspace::inequality(p(&[1.0, 1.0]), 0.0).unwrap(),
        ])
        .unwrap();
        let q = project_onto_polyhedron(&poly, &p(&[2.0, 1.5])).unwrap();
        assert!((r.nearest - q.point).norm() < 1e-8);
    }

    #[test]
    fn line_through_origin_in_three_dimensions() {
        let k = SetOracle::line_through_origin(&[1.0, 1.0, 0.0]).unwrap();
        let r = k.project(&p(&[1.0, 0.0, 2.0])).unwrap();
        assert!((r.nearest - p(&[0.5, 0.5, 0.0])).norm() < 1e-12);
        assert!(k.is_manifold() && k.is_convex());
    }
}
