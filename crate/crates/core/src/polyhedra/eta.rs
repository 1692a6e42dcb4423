//! Distance from the origin to the convex hull of a bundle of unit normals:
//! `η = min { ‖Σ λ_i v_i‖ : λ in the unit simplex }`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Point, Result};

const ENUMERATION_LIMIT: usize = 6;
const PG_MAX_ITERS: usize = 10_000;

pub fn eta(normals: &[Point]) -> Result<f64> {
    if normals.is_empty() {
        return Err(Error::EmptyBundle);
    }
    let n = normals[0].len();
    for v in normals {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
        if (v.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "normal has length {}",
                v.norm()
            )));
        }
    }
    let pg = eta_projected_gradient(normals);
    if normals.len() <= ENUMERATION_LIMIT {
        Ok(eta_enumeration(normals).min(pg))
    } else {
        Ok(pg)
    }
}

/// Exact minimum by enumerating supports: on each subset the minimiser over
/// the affine hull solves `[G 1; 1ᵀ 0][λ; μ] = [0; 1]`; feasible candidates
/// are upper bounds and the optimal support is among them.
pub fn eta_enumeration(normals: &[Point]) -> f64 {
    let k = normals.len();
    let gram = DMatrix::from_fn(k, k, |i, j| normals[i].dot(&normals[j]));
    let mut best = f64::INFINITY;
    for mask in 1u32..(1u32 << k) {
        let support: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let s = support.len();
        let mut kkt = DMatrix::zeros(s + 1, s + 1);
        for (a, &i) in support.iter().enumerate() {
            for (b, &j) in support.iter().enumerate() {
                kkt[(a, b)] = gram[(i, j)];
            }
            kkt[(a, s)] = 1.0;
            kkt[(s, a)] = 1.0;
        }
        let mut rhs = DVector::zeros(s + 1);
        rhs[s] = 1.0;
        let Ok(sol) = kkt.svd(true, true).solve(&rhs, 1e-13) else {
            continue;
        };
        let lam: Vec<f64> = sol.iter().take(s).copied().collect();
        let total: f64 = lam.iter().sum();
        if lam.iter().any(|&l| l < -1e-12) || (total - 1.0).abs() > 1e-9 {
            continue;
        }
        let mut v = Point::zeros(normals[0].len());
        for (&i, &l) in support.iter().zip(&lam) {
            v += &normals[i] * l.max(0.0);
        }
        best = best.min(v.norm() / total);
    }
    best
}

/// Projected gradient on the simplex with Armijo backtracking.
pub fn eta_projected_gradient(normals: &[Point]) -> f64 {
    let k = normals.len();
    let v = DMatrix::from_columns(normals);
    let objective = |lam: &DVector<f64>| 0.5 * (&v * lam).norm_squared();
    let mut lam = DVector::from_element(k, 1.0 / k as f64);
    let mut f = objective(&lam);
    let mut step = 1.0;
    for _ in 0..PG_MAX_ITERS {
        let grad = v.transpose() * (&v * &lam);
        let mut accepted = false;
        let mut trial_step = step;
        for _ in 0..60 {
            let cand = project_simplex(&(&lam - &grad * trial_step));
            let fc = objective(&cand);
            let decrease = grad.dot(&(&lam - &cand));
            if fc <= f - 1e-4 * decrease {
                let moved = (&cand - &lam).norm();
                lam = cand;
                let old = f;
                f = fc;
                accepted = true;
                step = (trial_step * 2.0).min(1e6);
                if moved <= 1e-15 || (old - f).abs() <= 1e-18 {
                    return (2.0 * f).max(0.0).sqrt();
                }
                break;
            }
            trial_step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (2.0 * f).max(0.0).sqrt()
}

/// Euclidean projection onto the unit simplex (sort-based).
fn project_simplex(y: &DVector<f64>) -> DVector<f64> {
    let mut u: Vec<f64> = y.iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    y.map(|v| (v - theta).max(0.0))
}
