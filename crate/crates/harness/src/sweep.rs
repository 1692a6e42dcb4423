//! Grid sweeps over `τ`, `p̄` and seeds, run in parallel.

use rayon::prelude::*;

use crate::config::{ExperimentConfig, SweepGrid};
use crate::experiment::run_resolved;
use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub pbar: usize,
    pub seed: u64,
    pub status: Option<String>,
    pub records: usize,
    pub final_max_distance: Option<f64>,
    pub tail_qlinear_rate: Option<f64>,
    pub estimated_order: Option<f64>,
    pub tail_pbar_ratio: Option<f64>,
    pub fejer_ok: Option<bool>,
    /// `8·L̄·τ` from the certified or estimated `β`.
    pub predicted_contraction: Option<f64>,
    pub error: Option<String>,
}

/// Cartesian product in `tau`-major, then `pbar`, then seed order. Axes left
/// empty take the base config's value.
pub fn grid_points(
    base: &ExperimentConfig,
    grid: &SweepGrid,
) -> Result<Vec<(f64, usize, u64)>, Error> {
    if grid.is_empty() {
        return Err(Error::Usage("sweep grid is empty".into()));
    }
    let taus = if grid.tau.is_empty() {
        vec![base.tau]
    } else {
        grid.tau.clone()
    };
    let pbars = if grid.pbar.is_empty() {
        vec![base.pbar]
    } else {
        grid.pbar.clone()
    };
    let seeds = if grid.seeds.is_empty() {
        vec![base.rng_seed]
    } else {
        grid.seeds.clone()
    };
    let mut pts = Vec::new();
    for &t in &taus {
        for &p in &pbars {
            for &s in &seeds {
                pts.push((t, p, s));
            }
        }
    }
    Ok(pts)
}

/// Runs every grid point. A failing point yields a row with `error` set; the
/// row order is the grid order regardless of scheduling.
pub fn run_sweep(base: &ExperimentConfig) -> Result<Vec<SweepRow>, Error> {
    let pts = grid_points(base, &base.sweep)?;
    base.resolve()?;
    Ok(pts
        .into_par_iter()
        .map(|(tau, pbar, seed)| {
            let mut cfg = base.clone();
            cfg.tau = tau;
            cfg.pbar = pbar;
            cfg.rng_seed = seed;
            cfg.sweep = SweepGrid::default();
            let mut row = SweepRow {
                tau,
                pbar,
                seed,
                status: None,
                records: 0,
                final_max_distance: None,
                tail_qlinear_rate: None,
                estimated_order: None,
                tail_pbar_ratio: None,
                fejer_ok: None,
                predicted_contraction: None,
                error: None,
            };
            match cfg
                .resolve()
                .map_err(Error::from)
                .and_then(|r| run_resolved(&cfg, &r))
            {
                Ok(o) => {
                    row.status = Some(o.trace.status.to_string());
                    row.records = o.trace.len();
                    row.final_max_distance = o.trace.records.last().map(|r| r.max_distance());
                    if let Ok(rr) = &o.diagnostics.rate_report {
                        row.tail_qlinear_rate = Some(rr.tail_qlinear_rate);
                        row.estimated_order = Some(rr.estimated_order);
                        row.tail_pbar_ratio = rr.tail_pbar_ratio();
                        row.fejer_ok = Some(rr.fejer_ok);
                    }
                    row.predicted_contraction = o
                        .diagnostics
                        .predicted_bounds
                        .as_ref()
                        .ok()
                        .map(|b| b.contraction);
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "tau,pbar,seed,terminal_status,records,final_max_distance,tail_qlinear_rate,estimated_order,tail_pbar_ratio,fejer_ok,predicted_contraction,error\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.tau,
            r.pbar,
            r.seed,
            r.status.as_deref().unwrap_or(""),
            r.records,
            opt(r.final_max_distance),
            opt(r.tail_qlinear_rate),
            opt(r.estimated_order),
            opt(r.tail_pbar_ratio),
            r.fejer_ok.map(|b| b.to_string()).unwrap_or_default(),
            opt(r.predicted_contraction),
            r.error.as_deref().map(quote).unwrap_or_default(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Algorithm, ProblemDef};

    #[test]
    fn empty_grid_is_usage_error() {
        let c = ExperimentConfig::new(ProblemDef::Named("halfspace-pair".into()), Algorithm::Map);
        assert!(matches!(run_sweep(&c), Err(Error::Usage(_))));
    }

    #[test]
    fn grid_order_is_tau_major() {
        let c = ExperimentConfig::new(ProblemDef::Named("halfspace-pair".into()), Algorithm::Map);
        let g = SweepGrid {
            tau: vec![0.1, 0.2],
            pbar: vec![],
            seeds: vec![1, 2],
        };
        let pts = grid_points(&c, &g).unwrap();
        assert_eq!(
            pts,
            vec![(0.1, 4, 1), (0.1, 4, 2), (0.2, 4, 1), (0.2, 4, 2)]
        );
    }
}
