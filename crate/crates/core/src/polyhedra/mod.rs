//! Halfspaces built from projections, polyhedra assembled from them, and the
//! machinery for projecting onto those polyhedra.

mod eta;
mod qp;

pub use eta::{eta, eta_enumeration, eta_projected_gradient};
pub use qp::{project_onto_polyhedron, project_onto_polyhedron_warm, QpResult, QpStatus};

use crate::{Error, Point, Result};

/// Smallest admissible normal length and gap between a point and its projection.
pub const MIN_NORMAL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `⟨a, x⟩ ≤ b`
    Inequality,
    /// `⟨a, x⟩ = b`
    Equality,
}

/// Provenance of a generated constraint: which set produced it, and at which
/// outer/inner step of the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tag {
    pub set: usize,
    pub outer: usize,
    pub inner: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Point,
    pub offset: f64,
    pub kind: ConstraintKind,
    pub tag: Option<Tag>,
}

impl Halfspace {
    pub fn new(normal: Point, offset: f64, kind: ConstraintKind) -> Result<Self> {
        if normal.norm() <= MIN_NORMAL {
            return Err(Error::InvalidArgument("halfspace normal is zero".into()));
        }
        if !offset.is_finite() || normal.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            normal,
            offset,
            kind,
            tag: None,
        })
    }

    pub fn inequality(normal: Point, offset: f64) -> Result<Self> {
        Self::new(normal, offset, ConstraintKind::Inequality)
    }

    pub fn equality(normal: Point, offset: f64) -> Result<Self> {
        Self::new(normal, offset, ConstraintKind::Equality)
    }

    pub fn with_tag(mut self, tag: Tag) -> Self {
        self.tag = Some(tag);
        self
    }

    pub fn dimension(&self) -> usize {
        self.normal.len()
    }

    pub fn is_equality(&self) -> bool {
        self.kind == ConstraintKind::Equality
    }

    /// Signed violation `⟨a, x⟩ − b` scaled to a Euclidean distance.
    pub fn signed_distance(&self, x: &Point) -> f64 {
        (self.normal.dot(x) - self.offset) / self.normal.norm()
    }

    /// Distance from `x` to the constraint set (the hyperplane for equalities).
    pub fn distance(&self, x: &Point) -> f64 {
        let s = self.signed_distance(x);
        match self.kind {
            ConstraintKind::Inequality => s.max(0.0),
            ConstraintKind::Equality => s.abs(),
        }
    }

    /// Distance from `x` to the bounding hyperplane `⟨a, x⟩ = b`.
    pub fn boundary_distance(&self, x: &Point) -> f64 {
        self.signed_distance(x).abs()
    }

    pub fn project(&self, x: &Point) -> Point {
        let s = self.normal.dot(x) - self.offset;
        let apply = match self.kind {
            ConstraintKind::Inequality => s > 0.0,
            ConstraintKind::Equality => s != 0.0,
        };
        if apply {
            x - &self.normal * (s / self.normal.norm_squared())
        } else {
            x.clone()
        }
    }

    /// The same halfspace with the equality relaxed to `⟨a, x⟩ ≤ b`.
    pub fn relaxed(&self) -> Self {
        Self {
            kind: ConstraintKind::Inequality,
            ..self.clone()
        }
    }
}

/// Builds the constraint produced by projecting `x_prev` onto a set and landing
/// at `proj`: normal `x_prev − proj`, offset `⟨a, (1−τ)·proj + τ·x_prev⟩`.
///
/// Manifolds yield the hyperplane through `proj` and ignore `tau`.
pub fn halfspace_from_projection(
    x_prev: &Point,
    proj: &Point,
    is_manifold: bool,
    tau: f64,
    tag: Option<Tag>,
) -> Result<Halfspace> {
    if x_prev.len() != proj.len() {
        return Err(Error::DimensionMismatch {
            expected: x_prev.len(),
            found: proj.len(),
        });
    }
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::InvalidArgument(format!("tau {tau} outside [0, 1)")));
    }
    let a = x_prev - proj;
    if a.norm() <= MIN_NORMAL {
        return Err(Error::ZeroGap);
    }
    let (kind, anchor) = if is_manifold {
        (ConstraintKind::Equality, proj.clone())
    } else {
        (
            ConstraintKind::Inequality,
            proj * (1.0 - tau) + x_prev * tau,
        )
    };
    let b = a.dot(&anchor);
    let mut h = Halfspace::new(a, b, kind)?;
    h.tag = tag;
    Ok(h)
}

/// An ordered intersection of halfspaces and hyperplanes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polyhedron {
    constraints: Vec<Halfspace>,
}

impl Polyhedron {
    /// Rejects mixed dimensions and two tagged constraints that share a
    /// source set within the same outer iteration.
    pub fn new(constraints: Vec<Halfspace>) -> Result<Self> {
        if let Some(first) = constraints.first() {
            let n = first.dimension();
            for c in &constraints {
                if c.dimension() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: c.dimension(),
                    });
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        for t in constraints.iter().filter_map(|c| c.tag) {
            if !seen.insert((t.set, t.outer)) {
                return Err(Error::DuplicateSource {
                    set: t.set,
                    outer: t.outer,
                });
            }
        }
        Ok(Self { constraints })
    }

    pub fn constraints(&self) -> &[Halfspace] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn dimension(&self) -> Option<usize> {
        self.constraints.first().map(Halfspace::dimension)
    }

    /// Largest constraint violation at `x`, in distance units.
    pub fn max_violation(&self, x: &Point) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.distance(x))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        self.max_violation(x) <= tol
    }

    /// Index of the oldest constraint by outer iteration (untagged constraints
    /// count as oldest), first in order on ties.
    pub fn oldest_index(&self) -> Option<usize> {
        self.constraints
            .iter()
            .enumerate()
            .min_by_key(|(i, c)| (c.tag.map_or(0, |t| t.outer + 1), *i))
            .map(|(i, _)| i)
    }

    pub fn without(&self, index: usize) -> Self {
        let mut constraints = self.constraints.clone();
        constraints.remove(index);
        Self { constraints }
    }
}

/// The halfspace `{x : ⟨x_prev − P_F(x_prev), x − P_F(x_prev)⟩ ≤ 0}` that
/// separates `x_prev` from the polyhedron `F` while containing it.
pub fn derived_halfspace(poly: &Polyhedron, x_prev: &Point) -> Result<Halfspace> {
    let qp = project_onto_polyhedron(poly, x_prev)?;
    if qp.status == QpStatus::Infeasible {
        return Err(Error::InvalidArgument("polyhedron is empty".into()));
    }
    let a = x_prev - &qp.point;
    if a.norm() <= 1e-12 {
        return Err(Error::NoSeparation);
    }
    let b = a.dot(&qp.point);
    Halfspace::inequality(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(v: &[f64]) -> Point {
        Point::from_row_slice(v)
    }

    #[test]
    fn halfspace_from_plain_projection() {
        let h =
            halfspace_from_projection(&p(&[0.0, 1.0, 0.0]), &p(&[0.0, 0.0, 0.0]), false, 0.0, None)
                .unwrap();
        assert_eq!(h.normal, p(&[0.0, 1.0, 0.0]));
        assert_eq!(h.offset, 0.0);
        assert_eq!(h.kind, ConstraintKind::Inequality);
    }

    #[test]
    fn halfspace_relaxed_by_tau() {
        let h =
            halfspace_from_projection(&p(&[0.0, 2.0]), &p(&[0.0, 0.0]), false, 0.5, None).unwrap();
        assert_eq!(h.normal, p(&[0.0, 2.0]));
        assert_abs_diff_eq!(h.offset, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn manifold_projection_gives_hyperplane() {
        let h =
            halfspace_from_projection(&p(&[2.0, 0.0]), &p(&[1.0, 0.0]), true, 0.3, None).unwrap();
        assert_eq!(h.kind, ConstraintKind::Equality);
        assert_eq!(h.normal, p(&[1.0, 0.0]));
        assert_eq!(h.offset, 1.0);
    }

    #[test]
    fn zero_gap_is_signalled() {
        let x = p(&[1.0, 2.0]);
        assert_eq!(
            halfspace_from_projection(&x, &x, false, 0.0, None),
            Err(Error::ZeroGap)
        );
    }

    #[test]
    fn polyhedron_rejects_same_source_in_one_iteration() {
        let tag = Tag {
            set: 1,
            outer: 4,
            inner: 0,
        };
        let h1 = Halfspace::inequality(p(&[1.0, 0.0]), 0.0)
            .unwrap()
            .with_tag(tag);
        let h2 = Halfspace::inequality(p(&[0.0, 1.0]), 0.0)
            .unwrap()
            .with_tag(Tag { inner: 1, ..tag });
        assert_eq!(
            Polyhedron::new(vec![h1.clone(), h2]),
            Err(Error::DuplicateSource { set: 1, outer: 4 })
        );
        let h3 = Halfspace::inequality(p(&[0.0, 1.0]), 0.0)
            .unwrap()
            .with_tag(Tag { outer: 5, ..tag });
        assert!(Polyhedron::new(vec![h1, h3]).is_ok());
    }

    #[test]
    fn derived_halfspace_of_single_constraint_is_parallel() {
        let h = Halfspace::inequality(p(&[1.0, 2.0]), 1.0).unwrap();
        let poly = Polyhedron::new(vec![h.clone()]).unwrap();
        let d = derived_halfspace(&poly, &p(&[3.0, 3.0])).unwrap();
        let cos = d.normal.dot(&h.normal) / (d.normal.norm() * h.normal.norm());
        assert_abs_diff_eq!(cos, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            d.offset / d.normal.norm(),
            h.offset / h.normal.norm(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn derived_halfspace_of_orthant_corner() {
        let poly = Polyhedron::new(vec![
            Halfspace::inequality(p(&[1.0, 0.0]), 0.0).unwrap(),
            Halfspace::inequality(p(&[0.0, 1.0]), 0.0).unwrap(),
        ])
        .unwrap();
        let d = derived_halfspace(&poly, &p(&[1.0, 1.0])).unwrap();
        let u = &d.normal / d.normal.norm();
        assert_abs_diff_eq!(u[0], 1.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(u[1], 1.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(d.offset, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn derived_halfspace_needs_separation() {
        let poly =
            Polyhedron::new(vec![Halfspace::inequality(p(&[1.0, 0.0]), 0.0).unwrap()]).unwrap();
        assert_eq!(
            derived_halfspace(&poly, &p(&[-1.0, 0.0])),
            Err(Error::NoSeparation)
        );
    }

    #[test]
    fn oldest_index_uses_outer_tag() {
        let mk = |outer| {
            Halfspace::inequality(p(&[1.0, 0.0]), outer as f64)
                .unwrap()
                .with_tag(Tag {
                    set: outer,
                    outer,
                    inner: 0,
                })
        };
        let poly = Polyhedron::new(vec![mk(3), mk(1), mk(2)]).unwrap();
        assert_eq!(poly.oldest_index(), Some(1));
    }
}
