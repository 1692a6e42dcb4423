use nalgebra::{DMatrix, DVector};

use crate::{Error, Point, Result};

const MAX_NEWTON: usize = 100;
const NEWTON_TOL: f64 = 1e-12;

/// Smooth functions defining level sets `{f ≤ 0}` and `{f = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelFunction {
    /// `f(x) = xᵀQx + cᵀx + d` with `Q` symmetrised on construction.
    Quadratic {
        q: DMatrix<f64>,
        c: DVector<f64>,
        d: f64,
    },
}

impl LevelFunction {
    pub fn quadratic(q: DMatrix<f64>, c: DVector<f64>, d: f64) -> Result<Self> {
        if !q.is_square() || q.nrows() != c.len() {
            return Err(Error::DimensionMismatch {
                expected: c.len(),
                found: q.nrows(),
            });
        }
        let q = (&q + q.transpose()) * 0.5;
        Ok(Self::Quadratic { q, c, d })
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::Quadratic { c, .. } => c.len(),
        }
    }

    pub fn value(&self, x: &Point) -> f64 {
        match self {
            Self::Quadratic { q, c, d } => x.dot(&(q * x)) + c.dot(x) + d,
        }
    }

    pub fn gradient(&self, x: &Point) -> Point {
        match self {
            Self::Quadratic { q, c, .. } => q * x * 2.0 + c,
        }
    }

    pub fn hessian(&self, _x: &Point) -> DMatrix<f64> {
        match self {
            Self::Quadratic { q, .. } => q * 2.0,
        }
    }

    /// Convex when the quadratic form is positive semidefinite.
    pub fn is_convex(&self) -> bool {
        match self {
            Self::Quadratic { q, .. } => q
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .all(|&l| l >= -1e-14),
        }
    }

    pub fn is_affine(&self) -> bool {
        match self {
            Self::Quadratic { q, .. } => q.amax() == 0.0,
        }
    }

    /// Nearest point on `{f = 0}` by Newton's method on the stationarity
    /// system `y − x + μ∇f(y) = 0, f(y) = 0`, started from `(x, 0)`, with a
    /// backtracking line search on the residual norm.
    ///
    /// Returns the point and the multiplier `μ`.
    pub fn project_to_zero_set(&self, x: &Point) -> Result<(Point, f64)> {
        let n = x.len();
        let mut y = x.clone();
        if self.gradient(&y).norm() <= 1e-14 {
            // Critical point of f: the nearest point is not locally unique.
            y[0] -= 1e-7;
        }
        let mut mu = 0.0;
        let residual = |y: &Point, mu: f64| -> (DVector<f64>, f64) {
            let g = self.gradient(y);
            let mut r = DVector::zeros(n + 1);
            r.rows_mut(0, n).copy_from(&(y - x + &g * mu));
            r[n] = self.value(y);
            let scale = g.norm().max(1.0);
            let size = r.rows(0, n).amax().max(r[n].abs() / scale);
            (r, size)
        };
        let (mut r, mut size) = residual(&y, mu);
        for iter in 0..MAX_NEWTON {
            if size <= NEWTON_TOL * (1.0 + x.amax()) {
                return Ok((y, mu));
            }
            let g = self.gradient(&y);
            let h = self.hessian(&y);
            let mut jac = DMatrix::zeros(n + 1, n + 1);
            jac.view_mut((0, 0), (n, n))
                .copy_from(&(DMatrix::identity(n, n) + h * mu));
            jac.view_mut((0, n), (n, 1)).copy_from(&g);
            jac.view_mut((n, 0), (1, n)).copy_from(&g.transpose());
            let step = match jac.clone().lu().solve(&(-&r)) {
                Some(s) if s.iter().all(|v| v.is_finite()) => s,
                _ => jac
                    .svd(true, true)
                    .solve(&(-&r), 1e-14)
                    .map_err(|_| self.not_converged(iter, size, &y))?,
            };
            let dy = step.rows(0, n).into_owned();
            let dmu = step[n];
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let cand = &y + &dy * t;
                let cmu = mu + dmu * t;
                let (cr, cs) = residual(&cand, cmu);
                if cs < size || cs <= NEWTON_TOL {
                    y = cand;
                    mu = cmu;
                    r = cr;
                    size = cs;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                return Err(self.not_converged(iter, size, &y));
            }
        }
        if size <= NEWTON_TOL * (1.0 + x.amax()) {
            Ok((y, mu))
        } else {
            Err(self.not_converged(MAX_NEWTON, size, &y))
        }
    }

    fn not_converged(&self, iterations: usize, residual: f64, y: &Point) -> Error {
        Error::ProjectionNotConverged {
            iterations,
            residual,
            last_iterate: y.iter().copied().collect(),
        }
    }
}
