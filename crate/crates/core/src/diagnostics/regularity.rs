use crate::linalg::{random_in_ball, random_unit, seeded_rng};
use crate::polyhedra::eta;
use crate::sets::{check_sosh, check_super_regular, SetOracle};
use crate::solvers::{run_mass_projection, ProblemInstance, SolverConfig, TerminalStatus};
use crate::{Error, Point, Result};

/// Where `d(x, K)` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceSource {
    Oracle,
    /// Distance to the limit of a tightly converged mass-projection run from
    /// the probe; an upper bound on `d(x, K)`.
    Proxy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityEstimate {
    /// Largest `d(x, K)/max_l d(x, K_l)` over probes, at least 1.
    pub beta_hat: f64,
    /// Distance from the origin to the hull of sampled unit normals at `x*`,
    /// minimised over the sign of manifold normals; 1 if no set is active.
    pub eta_hat: f64,
    /// `(radius, worst super-regularity ratio over all sets)`.
    pub delta_profile: Vec<(f64, f64)>,
    /// Largest second-order ratio at the smallest radius.
    pub sosh_m_hat: f64,
    pub distance_source: DistanceSource,
}

/// A unit normal of `set` at `x` taken from the projection residual of a
/// nearby probe; `None` if every probe lands inside the set.
pub fn sampled_normal(
    set: &SetOracle,
    x: &Point,
    attempts: usize,
    seed: u64,
) -> Result<Option<Point>> {
    let h = 1e-5 * x.norm().max(1.0);
    let mut rng = seeded_rng(seed);
    for _ in 0..attempts {
        let y = x + random_unit(&mut rng, x.len()) * h;
        let p = set.project(&y)?;
        if p.distance > 1e-3 * h && (&p.nearest - x).norm() <= 2.0 * h {
            return Ok(Some((&y - &p.nearest) / p.distance));
        }
    }
    Ok(None)
}

pub fn estimate_regularity(
    problem: &ProblemInstance,
    xstar: &Point,
    radii: &[f64],
    samples: usize,
    rng_seed: u64,
    allow_proxy: bool,
) -> Result<RegularityEstimate> {
    crate::linalg::check_dim(problem.dimension(), xstar)?;
    if radii.is_empty() || samples == 0 || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidArgument(
            "need positive radii and samples".into(),
        ));
    }
    let gap = problem.max_distance(xstar)?;
    if gap > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "x* is {gap:e} away from the sets"
        )));
    }
    let distance_source = match (problem.intersection().is_some(), allow_proxy) {
        (true, _) => DistanceSource::Oracle,
        (false, true) => DistanceSource::Proxy,
        (false, false) => return Err(Error::NoIntersectionOracle),
    };
    let proxy_cfg = SolverConfig {
        stop_tolerance: 1e-12,
        max_outer_iterations: 200,
        ..Default::default()
    };
    let mut rng = seeded_rng(rng_seed);
    let mut beta_hat: f64 = 1.0;
    for &r in radii {
        for _ in 0..samples {
            let x = random_in_ball(&mut rng, xstar, r);
            let dmax = problem.max_distance(&x)?;
            if dmax <= 1e-14 {
                continue;
            }
            let dk = match distance_source {
                DistanceSource::Oracle => problem.intersection_distance(&x)?,
                DistanceSource::Proxy => {
                    let t = run_mass_projection(problem, &x, &proxy_cfg)?;
                    if t.status != TerminalStatus::Converged {
                        continue;
                    }
                    (&x - t.last_point()).norm()
                }
            };
            beta_hat = beta_hat.max(dk / dmax);
        }
    }

    let mut normals: Vec<(Point, bool)> = Vec::new();
    for (l, set) in problem.sets().iter().enumerate() {
        if let Some(v) = sampled_normal(set, xstar, 64, rng_seed.wrapping_add(l as u64))? {
            normals.push((v, set.is_manifold()));
        }
    }
    let eta_hat = eta_over_signs(&normals)?;

    let mut delta_profile = Vec::new();
    for &r in radii {
        let mut worst = 0.0f64;
        for set in problem.sets() {
            match check_super_regular(set, xstar, 0.0, r, samples, rng_seed) {
                Ok(o) if o.worst.is_finite() => worst = worst.max(o.worst),
                Ok(_) | Err(Error::InsufficientSamples { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        delta_profile.push((r, worst));
    }
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let mut sosh_m_hat = 0.0f64;
    for set in problem.sets() {
        match check_sosh(set, xstar, f64::INFINITY, r_min, samples, rng_seed) {
            Ok(o) if o.worst.is_finite() => sosh_m_hat = sosh_m_hat.max(o.worst),
            Ok(_) | Err(Error::InsufficientSamples { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(RegularityEstimate {
        beta_hat,
        eta_hat,
        delta_profile,
        sosh_m_hat,
        distance_source,
    })
}

fn eta_over_signs(normals: &[(Point, bool)]) -> Result<f64> {
    if normals.is_empty() {
        return Ok(1.0);
    }
    let flippable: Vec<usize> = (0..normals.len())
        .filter(|&k| normals[k].1)
        .take(12)
        .collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1u32 << flippable.len()) {
        let bundle: Vec<Point> = normals
            .iter()
            .enumerate()
            .map(|(k, (v, _))| match flippable.iter().position(|&f| f == k) {
                Some(bit) if mask & (1 << bit) != 0 => -v,
                _ => v.clone(),
            })
            .collect();
        best = best.min(eta(&bundle)?);
    }
    Ok(best.clamp(0.0, 1.0))
}
