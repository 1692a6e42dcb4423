//! Trace CSV and report JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use shqp_core::diagnostics::{DistanceSource, PredictedBounds, RateReport, RegularityEstimate};
use shqp_core::solvers::Trace;

use crate::config::{ExperimentConfig, Format};
use crate::experiment::Outcome;
use crate::Error;

pub const TRACE_FILE: &str = "trace.csv";
pub const REPORT_FILE: &str = "report.json";

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

/// Columns `outer_i, inner_j, step_kind, x, dist_to_set_1..m,
/// qp_active_size, qp_kkt_residual`; `x` is `;`-joined.
pub fn trace_csv(trace: &Trace) -> String {
    let m = trace.records.first().map_or(0, |r| r.distances.len());
    let mut out = String::from("outer_i,inner_j,step_kind,x");
    for l in 1..=m {
        let _ = write!(out, ",dist_to_set_{l}");
    }
    out.push_str(",qp_active_size,qp_kkt_residual\n");
    for r in &trace.records {
        let x: Vec<String> = r.point.iter().map(|&v| sci(v)).collect();
        let _ = write!(out, "{},{},{},{}", r.outer, r.inner, r.kind, x.join(";"));
        for &d in &r.distances {
            let _ = write!(out, ",{}", sci(d));
        }
        match r.qp {
            Some(q) => {
                let _ = write!(out, ",{},{}", q.active_size, sci(q.kkt_residual));
            }
            None => out.push_str(",,"),
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum Part<T> {
    Value(T),
    Failed { error: String },
}

fn part<T, U>(r: &Result<T, String>, f: impl FnOnce(&T) -> U) -> Part<U> {
    match r {
        Ok(v) => Part::Value(f(v)),
        Err(e) => Part::Failed { error: e.clone() },
    }
}

#[derive(Debug, Serialize)]
struct RateJson {
    q_ratios: Vec<f64>,
    tail_qlinear_rate: f64,
    estimated_order: f64,
    fejer_ok: bool,
    pbar_ratios: Vec<f64>,
    tail_pbar_ratio: Option<f64>,
    usable_errors: usize,
}

impl From<&RateReport> for RateJson {
    fn from(r: &RateReport) -> Self {
        Self {
            q_ratios: r.q_ratios.clone(),
            tail_qlinear_rate: r.tail_qlinear_rate,
            estimated_order: r.estimated_order,
            fejer_ok: r.fejer_ok,
            pbar_ratios: r.pbar_ratios.clone(),
            tail_pbar_ratio: r.tail_pbar_ratio(),
            usable_errors: r.usable,
        }
    }
}

#[derive(Debug, Serialize)]
struct RegularityJson {
    beta_hat: f64,
    eta_hat: f64,
    delta_profile: Vec<(f64, f64)>,
    sosh_m_hat: f64,
    distance_source: &'static str,
}

impl From<&RegularityEstimate> for RegularityJson {
    fn from(r: &RegularityEstimate) -> Self {
        Self {
            beta_hat: r.beta_hat,
            eta_hat: r.eta_hat,
            delta_profile: r.delta_profile.clone(),
            sosh_m_hat: r.sosh_m_hat,
            distance_source: match r.distance_source {
                DistanceSource::Oracle => "oracle",
                DistanceSource::Proxy => "proxy",
            },
        }
    }
}

#[derive(Debug, Serialize)]
struct BoundsJson {
    rho_block: f64,
    c_block: f64,
    rho_relaxed: f64,
    l_relaxed: f64,
    rho_bar: f64,
    l_bar: f64,
    contraction: f64,
    bound_vacuous: bool,
}

impl From<&PredictedBounds> for BoundsJson {
    fn from(b: &PredictedBounds) -> Self {
        Self {
            rho_block: b.rho_block,
            c_block: b.c_block,
            rho_relaxed: b.rho_relaxed,
            l_relaxed: b.l_relaxed,
            rho_bar: b.rho_bar,
            l_bar: b.l_bar,
            contraction: b.contraction,
            bound_vacuous: b.bound_vacuous,
        }
    }
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    config_echo: &'a ExperimentConfig,
    terminal_status: String,
    x0: Vec<f64>,
    final_point: Vec<f64>,
    reference_point: Vec<f64>,
    records: usize,
    qp_steps: usize,
    rate_report: Part<RateJson>,
    regularity_estimate: Part<RegularityJson>,
    predicted_bounds: Part<BoundsJson>,
    wallclock_ms: Option<f64>,
}

/// Pretty JSON; `wallclock_ms` is `null` unless `timing` is set so that
/// reruns are byte-identical.
pub fn report_json(outcome: &Outcome, timing: bool) -> String {
    let d = &outcome.diagnostics;
    let report = Report {
        config_echo: &outcome.config,
        terminal_status: outcome.trace.status.to_string(),
        x0: outcome.x0.iter().copied().collect(),
        final_point: outcome.trace.last_point().iter().copied().collect(),
        reference_point: d.xbar.iter().copied().collect(),
        records: outcome.trace.len(),
        qp_steps: outcome.trace.qp_steps(),
        rate_report: part(&d.rate_report, |r| RateJson::from(r)),
        regularity_estimate: part(&d.regularity, |r| RegularityJson::from(r)),
        predicted_bounds: part(&d.predicted_bounds, |b| BoundsJson::from(b)),
        wallclock_ms: timing.then_some(outcome.wallclock_ms),
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serialises");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes the requested formats into `dir` and returns the paths written.
pub fn write_outcome(
    outcome: &Outcome,
    dir: &Path,
    formats: &[Format],
    timing: bool,
) -> Result<Vec<PathBuf>, Error> {
    let mut written = Vec::new();
    for f in formats {
        let (name, body) = match f {
            Format::Csv => (TRACE_FILE, trace_csv(&outcome.trace)),
            Format::Json => (REPORT_FILE, report_json(outcome, timing)),
        };
        let path = dir.join(name);
        write_file(&path, &body)?;
        written.push(path);
    }
    Ok(written)
}
