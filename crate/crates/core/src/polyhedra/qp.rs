//! Euclidean projection onto a polyhedron:
//!
//! ```text
//!     minimize    ½‖x − x₀‖²
//!     subject to  ⟨a_k, x⟩ = b_k   (equalities)
//!                 ⟨a_k, x⟩ ≤ b_k   (inequalities)
//! ```
//!
//! Equalities are eliminated first by moving onto their affine span; the
//! inequalities are then handled by a Goldfarb–Idnani style dual active-set
//! method specialised to the identity Hessian. Each inequality enters the
//! active set only when violated, so the dual iterates stay feasible and an
//! inconsistent system surfaces as a linearly dependent violated constraint
//! with nonpositive dual direction, which is exactly a Farkas certificate.

use nalgebra::{DMatrix, DVector};

use super::{ConstraintKind, Polyhedron};
use crate::{Error, Point, Result};

const RANK_TOL: f64 = 1e-10;
const DEPENDENT_TOL: f64 = 1e-12;
/// A violated constraint whose normal is this close (relative) to the span of
/// the active normals is treated as dependent.
const NEAR_DEPENDENT: f64 = 1e-9;
/// Reduced problems up to this many inequalities are re-solved by active-set
/// enumeration when the dual method ends with a poor KKT residual.
const ENUMERATION_LIMIT: usize = 12;
const PARALLEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpResult {
    pub point: Point,
    /// Indices (into the polyhedron's constraint list) of the active inequalities
    /// followed by all retained equalities.
    pub active_set: Vec<usize>,
    /// One multiplier per constraint, in the scale of the supplied normals.
    /// Inequalities are nonnegative; equalities carry a free sign.
    pub multipliers: Vec<f64>,
    pub kkt_residual: f64,
    pub status: QpStatus,
    /// Farkas multipliers `λ` with `Σ λ_k a_k = 0`, `Σ λ_k b_k < 0` when infeasible.
    pub certificate: Option<Vec<f64>>,
    pub iterations: usize,
}

pub fn project_onto_polyhedron(poly: &Polyhedron, x0: &Point) -> Result<QpResult> {
    project_onto_polyhedron_warm(poly, x0, &[])
}

/// Same as [`project_onto_polyhedron`]; constraints listed in `warm` are tried
/// first whenever they are violated, which reproduces a previous active set
/// in few iterations.
pub fn project_onto_polyhedron_warm(
    poly: &Polyhedron,
    x0: &Point,
    warm: &[usize],
) -> Result<QpResult> {
    let n = x0.len();
    if let Some(d) = poly.dimension() {
        if d != n {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: n,
            });
        }
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let cons = poly.constraints();
    let m = cons.len();
    if m == 0 {
        return Ok(QpResult {
            point: x0.clone(),
            active_set: vec![],
            multipliers: vec![],
            kkt_residual: 0.0,
            status: QpStatus::Optimal,
            certificate: None,
            iterations: 0,
        });
    }

    let norms: Vec<f64> = cons.iter().map(|c| c.normal.norm()).collect();
    let units: Vec<Point> = cons
        .iter()
        .zip(&norms)
        .map(|(c, s)| &c.normal / *s)
        .collect();
    let offs: Vec<f64> = cons.iter().zip(&norms).map(|(c, s)| c.offset / s).collect();

    let keep = dedup(cons.iter().map(|c| c.kind).collect(), &units, &offs);
    let eq_idx: Vec<usize> = (0..m)
        .filter(|&k| keep[k] && cons[k].kind == ConstraintKind::Equality)
        .collect();
    let in_idx: Vec<usize> = (0..m)
        .filter(|&k| keep[k] && cons[k].kind == ConstraintKind::Inequality)
        .collect();

    // Normalised multipliers/certificates are collected here and rescaled at the end.
    let unit_mult = vec![0.0; m];
    let finish_infeasible = |cert_unit: Vec<f64>, x: Point, iterations: usize| {
        let cert: Vec<f64> = cert_unit.iter().zip(&norms).map(|(l, s)| l / s).collect();
        QpResult {
            point: x,
            active_set: vec![],
            multipliers: vec![0.0; m],
            kkt_residual: f64::INFINITY,
            status: QpStatus::Infeasible,
            certificate: Some(cert),
            iterations,
        }
    };

    // Affine span of the equalities.
    let eq = EqualitySpace::new(&eq_idx, &units, &offs, n, x0);
    let xp = eq.particular.clone();
    if let Some(s) = eq.inconsistency(&eq_idx, &units, &offs) {
        let mut cert = vec![0.0; m];
        for (r, &k) in eq_idx.iter().enumerate() {
            cert[k] = s[r];
        }
        return Ok(finish_infeasible(cert, xp, 0));
    }
    let z_basis = &eq.null_basis;

    // Reduced inequalities g_k·z ≤ h_k in null-space coordinates.
    let mut red_idx = Vec::new();
    let mut g = Vec::new();
    let mut h = Vec::new();
    for &k in &in_idx {
        let gk = z_basis.transpose() * &units[k];
        let hk = offs[k] - units[k].dot(&xp);
        if gk.norm() <= DEPENDENT_TOL {
            if hk < -RANK_TOL {
                // u_k ∈ span(E): combine with equality multipliers.
                let nu = eq.span_coefficients(&units[k]);
                let mut cert = vec![0.0; m];
                cert[k] = 1.0;
                for (r, &e) in eq_idx.iter().enumerate() {
                    cert[e] -= nu[r];
                }
                return Ok(finish_infeasible(cert, xp, 0));
            }
            continue;
        }
        red_idx.push(k);
        g.push(gk);
        h.push(hk);
    }

    let z0 = z_basis.transpose() * (x0 - &xp);
    let warm_red: Vec<usize> = warm
        .iter()
        .filter_map(|w| red_idx.iter().position(|k| k == w))
        .collect();
    let outcome = dual_active_set(&g, &h, &z0, &warm_red, 50 * (red_idx.len() + 1))?;

    let iterations = outcome.iterations;
    match outcome.kind {
        DualOutcome::Infeasible(mu) => {
            // Σ μ_k Zᵀu_k = 0 ⇒ Σ μ_k u_k = Eᵀν; subtract ν on the equalities.
            let mut combo = Point::zeros(n);
            let mut cert = vec![0.0; m];
            for (r, &k) in red_idx.iter().enumerate() {
                cert[k] = mu[r];
                combo += &units[k] * mu[r];
            }
            let nu = eq.span_coefficients(&combo);
            for (r, &e) in eq_idx.iter().enumerate() {
                cert[e] -= nu[r];
            }
            let point = &xp + z_basis * &outcome.z;
            Ok(finish_infeasible(cert, point, iterations))
        }
        DualOutcome::Optimal { active, lambda } => {
            let build = |z: &DVector<f64>, active: &[usize], lambda: &[f64]| {
                let x = &xp + z_basis * z;
                let mut unit_mult = unit_mult.clone();
                let mut stationarity = x0 - &x;
                for (&r, &l) in active.iter().zip(lambda) {
                    let k = red_idx[r];
                    unit_mult[k] = l;
                    stationarity -= &units[k] * l;
                }
                let mu = eq.span_coefficients(&stationarity);
                for (r, &e) in eq_idx.iter().enumerate() {
                    unit_mult[e] = mu[r];
                }
                let multipliers: Vec<f64> =
                    unit_mult.iter().zip(&norms).map(|(l, s)| l / s).collect();
                let mut active_set: Vec<usize> = active.iter().map(|&r| red_idx[r]).collect();
                active_set.extend(eq_idx.iter().copied());
                let kkt_residual = kkt_residual(poly, x0, &x, &multipliers);
                QpResult {
                    point: x,
                    active_set,
                    multipliers,
                    kkt_residual,
                    status: QpStatus::Optimal,
                    certificate: None,
                    iterations,
                }
            };
            let result = build(&outcome.z, &active, &lambda);
            let scale = 1.0 + x0.amax() + offs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            if result.kkt_residual > 1e-8 * scale && red_idx.len() <= ENUMERATION_LIMIT {
                if let Some((z, act, lam)) = enumerate_active(&g, &h, &z0) {
                    let alt = build(&z, &act, &lam);
                    if alt.kkt_residual < result.kkt_residual {
                        return Ok(alt);
                    }
                }
            }
            Ok(result)
        }
    }
}

/// Point, active indices and multipliers of a candidate solution.
type Candidate = (DVector<f64>, Vec<usize>, Vec<f64>);

/// Exhaustive search over active subsets of size at most `dim(z)`; returns
/// the closest point satisfying all constraints with nonnegative multipliers.
fn enumerate_active(g: &[DVector<f64>], h: &[f64], z0: &DVector<f64>) -> Option<Candidate> {
    let k = g.len();
    let dim = z0.len();
    let tol = 1e-10 * (1.0 + z0.amax());
    let mut best: Option<(f64, Candidate)> = None;
    for mask in 0u32..(1u32 << k) {
        let support: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        if support.len() > dim {
            continue;
        }
        let (z, lambda) = if support.is_empty() {
            (z0.clone(), Vec::new())
        } else {
            let gm =
                DMatrix::from_columns(&support.iter().map(|&i| g[i].clone()).collect::<Vec<_>>());
            let rhs =
                DVector::from_iterator(support.len(), support.iter().map(|&i| g[i].dot(z0) - h[i]));
            let gram = gm.transpose() * &gm;
            let svd = gram.svd(true, true);
            let smax = svd.singular_values.max();
            if svd.singular_values.min() <= 1e-12 * smax {
                continue;
            }
            let Ok(lam) = svd.solve(&rhs, 0.0) else {
                continue;
            };
            if lam.iter().any(|&l| l < -tol) {
                continue;
            }
            (z0 - &gm * &lam, lam.iter().map(|l| l.max(0.0)).collect())
        };
        if g.iter().zip(h).any(|(gi, hi)| gi.dot(&z) - hi > tol) {
            continue;
        }
        let d = (&z - z0).norm();
        if best.as_ref().is_none_or(|b| d < b.0) {
            best = Some((d, (z, support, lambda)));
        }
    }
    best.map(|(_, c)| c)
}

/// Marks near-duplicate constraints for removal: parallel inequalities keep the
/// tighter one, coincident equalities keep the first.
fn dedup(kinds: Vec<ConstraintKind>, units: &[Point], offs: &[f64]) -> Vec<bool> {
    let m = units.len();
    let mut keep = vec![true; m];
    for i in 0..m {
        if !keep[i] {
            continue;
        }
        for j in (i + 1)..m {
            if !keep[j] || kinds[i] != kinds[j] {
                continue;
            }
            let same = (&units[i] - &units[j]).norm() <= PARALLEL_TOL;
            let opposite = (&units[i] + &units[j]).norm() <= PARALLEL_TOL;
            match kinds[i] {
                ConstraintKind::Inequality if same => {
                    if offs[j] < offs[i] {
                        keep[i] = false;
                        break;
                    }
                    keep[j] = false;
                }
                ConstraintKind::Equality if same && (offs[i] - offs[j]).abs() <= RANK_TOL => {
                    keep[j] = false;
                }
                ConstraintKind::Equality if opposite && (offs[i] + offs[j]).abs() <= RANK_TOL => {
                    keep[j] = false;
                }
                _ => {}
            }
        }
    }
    keep
}

struct EqualitySpace {
    /// Rows are the unit equality normals.
    rows: DMatrix<f64>,
    particular: Point,
    null_basis: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

impl EqualitySpace {
    fn new(eq_idx: &[usize], units: &[Point], offs: &[f64], n: usize, x0: &Point) -> Self {
        if eq_idx.is_empty() {
            return Self {
                rows: DMatrix::zeros(0, n),
                particular: x0.clone(),
                null_basis: DMatrix::identity(n, n),
                pinv: DMatrix::zeros(n, 0),
            };
        }
        let r = eq_idx.len();
        let rows = DMatrix::from_fn(r, n, |i, j| units[eq_idx[i]][j]);
        let e = DVector::from_iterator(r, eq_idx.iter().map(|&k| offs[k]));
        // Full SVD of Eᵀ (n × r) gives both range and null space of E.
        let svd = rows.transpose().svd(true, true);
        let u = svd.u.as_ref().expect("svd u");
        let sigma = &svd.singular_values;
        let smax = sigma.iter().cloned().fold(0.0, f64::max);
        let rank = sigma
            .iter()
            .filter(|&&s| s > RANK_TOL * smax.max(1.0))
            .count();
        let pinv = rows
            .clone()
            .pseudo_inverse(RANK_TOL * smax.max(1.0))
            .expect("pseudo-inverse with nonnegative tolerance");
        let particular = x0 - &pinv * (&rows * x0 - &e);
        // Orthonormal complement of range(Eᵀ) via QR of [range | I].
        let range = {
            let mut cols = Vec::with_capacity(rank);
            let mut order: Vec<usize> = (0..sigma.len()).collect();
            order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
            for &c in order.iter().take(rank) {
                cols.push(u.column(c).into_owned());
            }
            cols
        };
        let null_basis = orthonormal_complement(&range, n);
        Self {
            rows,
            particular,
            null_basis,
            pinv,
        }
    }

    /// The least-squares residual of an inconsistent equality system, usable
    /// directly as free-sign Farkas multipliers.
    fn inconsistency(&self, eq_idx: &[usize], _units: &[Point], offs: &[f64]) -> Option<Vec<f64>> {
        if eq_idx.is_empty() {
            return None;
        }
        let e = DVector::from_iterator(eq_idx.len(), eq_idx.iter().map(|&k| offs[k]));
        let s = &self.rows * &self.particular - e;
        if s.amax() > RANK_TOL {
            Some(s.iter().copied().collect())
        } else {
            None
        }
    }

    /// Coefficients `ν` with `Eᵀν ≈ v` (least squares).
    fn span_coefficients(&self, v: &Point) -> Vec<f64> {
        if self.rows.nrows() == 0 {
            return vec![];
        }
        (self.pinv.transpose() * v).iter().copied().collect()
    }
}

fn orthonormal_complement(range: &[Point], n: usize) -> DMatrix<f64> {
    let mut basis: Vec<Point> = range.to_vec();
    let mut complement = Vec::new();
    for i in 0..n {
        let mut v = Point::zeros(n);
        v[i] = 1.0;
        // Two Gram–Schmidt passes keep the basis orthonormal to rounding.
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&v);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            v /= norm;
            basis.push(v.clone());
            complement.push(v);
        }
        if basis.len() == n {
            break;
        }
    }
    if complement.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&complement)
    }
}

enum DualOutcome {
    Optimal {
        active: Vec<usize>,
        lambda: Vec<f64>,
    },
    Infeasible(Vec<f64>),
}

struct DualRun {
    z: DVector<f64>,
    kind: DualOutcome,
    iterations: usize,
}

/// Dual active-set iteration for `min ½‖z − z0‖²` subject to `g_k·z ≤ h_k`.
fn dual_active_set(
    g: &[DVector<f64>],
    h: &[f64],
    z0: &DVector<f64>,
    warm: &[usize],
    cap: usize,
) -> Result<DualRun> {
    let mut z = z0.clone();
    let mut active: Vec<usize> = Vec::new();
    let mut lambda: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let dim = z0.len();

    loop {
        let tol = 1e-12 * (1.0 + z.norm());
        let violation = |k: usize, z: &DVector<f64>| g[k].dot(z) - h[k];
        let pick = |cands: &mut dyn Iterator<Item = usize>, z: &DVector<f64>| {
            let mut best: Option<(usize, f64)> = None;
            for k in cands {
                let s = violation(k, z);
                if s > tol && best.is_none_or(|(_, bs)| s > bs) {
                    best = Some((k, s));
                }
            }
            best.map(|(k, _)| k)
        };
        let p = pick(
            &mut warm.iter().copied().filter(|k| !active.contains(k)),
            &z,
        )
        .or_else(|| pick(&mut (0..g.len()).filter(|k| !active.contains(k)), &z));
        let Some(p) = p else {
            return Ok(DualRun {
                z,
                kind: DualOutcome::Optimal { active, lambda },
                iterations,
            });
        };

        let mut lambda_p = 0.0;
        loop {
            iterations += 1;
            if iterations > cap {
                return Err(Error::QpIterationLimit { iterations });
            }
            let (r, dir) = if active.is_empty() {
                (DVector::zeros(0), g[p].clone())
            } else {
                let nmat = DMatrix::from_columns(
                    &active.iter().map(|&k| g[k].clone()).collect::<Vec<_>>(),
                );
                let svd = nmat.clone().svd(true, true);
                let smax = svd.singular_values.max();
                let r = svd
                    .solve(&g[p], 1e-12 * smax.max(1e-300))
                    .expect("svd solve");
                let dir = &g[p] - &nmat * &r;
                (r, dir)
            };
            let mut t1 = f64::INFINITY;
            let mut drop = None;
            for (q, &rq) in r.iter().enumerate() {
                if rq > 1e-14 {
                    let t = lambda[q] / rq;
                    if t < t1 {
                        t1 = t;
                        drop = Some(q);
                    }
                }
            }
            let dependent = dir.norm() <= NEAR_DEPENDENT * g[p].norm() || active.len() >= dim;
            if dependent {
                match drop {
                    None => {
                        let mut mu = vec![0.0; g.len()];
                        mu[p] = 1.0;
                        for (q, &k) in active.iter().enumerate() {
                            mu[k] = -r[q].min(0.0);
                        }
                        return Ok(DualRun {
                            z,
                            kind: DualOutcome::Infeasible(mu),
                            iterations,
                        });
                    }
                    Some(q) => {
                        for (lq, rq) in lambda.iter_mut().zip(r.iter()) {
                            *lq -= t1 * rq;
                        }
                        lambda_p += t1;
                        active.remove(q);
                        lambda.remove(q);
                        continue;
                    }
                }
            }
            let s_p = violation(p, &z);
            let t2 = (s_p / dir.norm_squared()).max(0.0);
            let t = t1.min(t2);
            z -= &dir * t;
            for (lq, rq) in lambda.iter_mut().zip(r.iter()) {
                *lq -= t * rq;
            }
            lambda_p += t;
            if t2 <= t1 {
                active.push(p);
                lambda.push(lambda_p);
                break;
            }
            let q = drop.expect("partial step implies a blocking multiplier");
            active.remove(q);
            lambda.remove(q);
        }
    }
}

fn kkt_residual(poly: &Polyhedron, x0: &Point, x: &Point, mult: &[f64]) -> f64 {
    let mut stat = x - x0;
    let mut primal: f64 = 0.0;
    let mut comp: f64 = 0.0;
    let mut dual: f64 = 0.0;
    for (c, &l) in poly.constraints().iter().zip(mult) {
        stat += &c.normal * l;
        let s = c.signed_distance(x);
        match c.kind {
            ConstraintKind::Inequality => {
                primal = primal.max(s);
                dual = dual.max(-l);
                comp = comp.max((l * c.normal.norm() * s).abs());
            }
            ConstraintKind::Equality => primal = primal.max(s.abs()),
        }
    }
    stat.amax().max(primal).max(comp).max(dual)
}
