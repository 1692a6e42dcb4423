//! Empirical evidence for local regularity: random ambient points near a
//! base point are projected onto the set, and the projection residuals serve
//! as sampled normals. Sampling gives evidence, never a certificate.

use crate::linalg::{random_in_ball, seeded_rng};
use crate::{Error, Point, Result};

use super::SetOracle;

const CHECK_SLACK: f64 = 1e-9;
const MIN_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerOutcome {
    pub holds: bool,
    /// Largest ratio observed; `-∞` if no (member, normal) pair was found.
    pub worst: f64,
    pub pairs: usize,
}

struct Samples {
    members: Vec<Point>,
    /// (base point, unit normal) pairs; manifolds contribute both signs.
    normals: Vec<(Point, Point)>,
}

fn sample(
    set: &SetOracle,
    center: &Point,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<Samples> {
    if !(radius > 0.0) || count == 0 {
        return Err(Error::InvalidArgument(
            "radius and sample count must be positive".into(),
        ));
    }
    let mut rng = seeded_rng(seed);
    let mut members = vec![center.clone()];
    let mut normals = Vec::new();
    for _ in 0..count {
        let x = random_in_ball(&mut rng, center, radius);
        let proj = set.project(&x)?;
        let y = proj.nearest;
        if (&y - center).norm() > radius {
            continue;
        }
        if proj.distance > MIN_GAP {
            let v = (&x - &y) / proj.distance;
            if set.is_manifold() {
                normals.push((y.clone(), -&v));
            }
            normals.push((y.clone(), v));
        }
        members.push(y);
    }
    let distinct = {
        let mut d: Vec<&Point> = Vec::new();
        for m in &members {
            if d.iter().all(|q| (*q - m).norm() > MIN_GAP) {
                d.push(m);
            }
            if d.len() >= 2 {
                break;
            }
        }
        d.len()
    };
    if distinct < 2 {
        return Err(Error::InsufficientSamples { found: distinct });
    }
    Ok(Samples { members, normals })
}

/// Checks `⟨z − y, v⟩ ≤ δ‖z − y‖‖v‖` for sampled members `z, y` of the set
/// near `center` and sampled normals `v` at `y`.
pub fn check_super_regular(
    set: &SetOracle,
    center: &Point,
    delta: f64,
    radius: f64,
    sample_count: usize,
    rng_seed: u64,
) -> Result<SamplerOutcome> {
    let s = sample(set, center, radius, sample_count, rng_seed)?;
    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0;
    for (y, v) in &s.normals {
        for z in &s.members {
            let d = z - y;
            let len = d.norm();
            if len <= MIN_GAP {
                continue;
            }
            worst = worst.max(d.dot(v) / len);
            pairs += 1;
        }
    }
    Ok(SamplerOutcome {
        holds: worst <= delta + CHECK_SLACK,
        worst,
        pairs,
    })
}

/// Checks the second-order supporting hyperplane inequality
/// `⟨v, x − x̄⟩ ≤ M‖x̄ − x‖²` on sampled boundary points `x` with normals `v`.
pub fn check_sosh(
    set: &SetOracle,
    xbar: &Point,
    m: f64,
    radius: f64,
    sample_count: usize,
    rng_seed: u64,
) -> Result<SamplerOutcome> {
    ratio_check(set, xbar, radius, sample_count, rng_seed, 2, m)
}

/// Checks the first-order version `⟨v, x − x̄⟩ ≤ ε‖x̄ − x‖`.
pub fn check_supporting_hyperplane(
    set: &SetOracle,
    xbar: &Point,
    epsilon: f64,
    radius: f64,
    sample_count: usize,
    rng_seed: u64,
) -> Result<SamplerOutcome> {
    ratio_check(set, xbar, radius, sample_count, rng_seed, 1, epsilon)
}

fn ratio_check(
    set: &SetOracle,
    xbar: &Point,
    radius: f64,
    sample_count: usize,
    rng_seed: u64,
    power: i32,
    bound: f64,
) -> Result<SamplerOutcome> {
    let s = sample(set, xbar, radius, sample_count, rng_seed)?;
    let mut worst = f64::NEG_INFINITY;
    let mut pairs = 0;
    for (x, v) in &s.normals {
        let d = x - xbar;
        let len = d.norm();
        if len <= 1e-10 * radius.max(1e-300) {
            continue;
        }
        worst = worst.max(v.dot(&d) / len.powi(power));
        pairs += 1;
    }
    Ok(SamplerOutcome {
        holds: worst <= bound + CHECK_SLACK,
        worst,
        pairs,
    })
}

/// Shrinks the sampling radius geometrically until the first-order supporting
/// hyperplane check passes; returns the radius found.
pub fn shrink_until_supporting(
    set: &SetOracle,
    xbar: &Point,
    epsilon: f64,
    start_radius: f64,
    max_halvings: usize,
    sample_count: usize,
    rng_seed: u64,
) -> Result<Option<f64>> {
    let mut radius = start_radius;
    for _ in 0..=max_halvings {
        if check_supporting_hyperplane(set, xbar, epsilon, radius, sample_count, rng_seed)?.holds {
            return Ok(Some(radius));
        }
        radius *= 0.5;
    }
    Ok(None)
}
