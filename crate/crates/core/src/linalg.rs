//! Small vector helpers shared across the crate.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Point, Result};

/// Seeded generator used by every sampler and random start in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn check_dim(expected: usize, x: &Point) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Lexicographic comparison of coordinates.
pub fn lex_cmp(a: &Point, b: &Point) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Picks the nearest candidate to `x`; candidates within `tie_tol` of the best
/// distance are resolved by the lexicographically smallest coordinates.
pub fn nearest_with_tiebreak(x: &Point, candidates: Vec<Point>, tie_tol: f64) -> Option<Point> {
    let dists: Vec<f64> = candidates.iter().map(|c| (x - c).norm()).collect();
    let best = dists.iter().cloned().fold(f64::INFINITY, f64::min);
    candidates
        .into_iter()
        .zip(dists)
        .filter(|(_, d)| *d <= best + tie_tol)
        .map(|(c, _)| c)
        .min_by(lex_cmp)
}

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Point {
    loop {
        let v = Point::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Uniform sample from the closed ball `B(center, radius)`.
pub fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, center: &Point, radius: f64) -> Point {
    let n = center.len();
    let dir = random_unit(rng, n);
    let u: f64 = rng.random();
    center + dir * (radius * u.powf(1.0 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiebreak_prefers_lexicographically_smallest() {
        let x = Point::from_vec(vec![0.0, 0.0]);
        let c = vec![
            Point::from_vec(vec![1.0, 0.0]),
            Point::from_vec(vec![-1.0, 0.0]),
            Point::from_vec(vec![0.0, 1.0]),
        ];
        let p = nearest_with_tiebreak(&x, c, 1e-12).unwrap();
        assert_eq!(p, Point::from_vec(vec![-1.0, 0.0]));
    }

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = seeded_rng(7);
        let c = Point::from_vec(vec![1.0, -2.0, 0.5]);
        for _ in 0..1000 {
            let p = random_in_ball(&mut rng, &c, 0.3);
            assert!((p - &c).norm() <= 0.3 + 1e-15);
        }
    }

    #[test]
    fn rejects_bad_dimension_and_nan() {
        let x = Point::from_vec(vec![1.0, f64::NAN]);
        assert_eq!(check_dim(2, &x), Err(Error::NonFinite));
        assert!(matches!(
            check_dim(3, &x),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
    }
}
