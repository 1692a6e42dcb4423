use crate::solvers::Trace;
use crate::{Error, Point, Result};

pub const MIN_USABLE_ERRORS: usize = 4;
const TAIL_MIN: usize = 4;
const FEJER_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    /// `e_{i+1}/e_i` over the usable prefix.
    pub q_ratios: Vec<f64>,
    /// Geometric mean of the last quarter of `q_ratios` (at least 4).
    pub tail_qlinear_rate: f64,
    /// Slope of `log e_{i+1}` against `log e_i` over the same tail.
    pub estimated_order: f64,
    /// `e_{i+1} ≤ e_i + 1e-10` along the whole sequence.
    pub fejer_ok: bool,
    /// `e_{i+p̄}/e_i` over the usable prefix.
    pub pbar_ratios: Vec<f64>,
    pub usable: usize,
}

impl RateReport {
    /// Geometric mean of the last quarter of `pbar_ratios`; `None` if empty.
    pub fn tail_pbar_ratio(&self) -> Option<f64> {
        let t = tail(&self.pbar_ratios);
        (!t.is_empty()).then(|| geometric_mean(t))
    }
}

/// Errors at or below this level are rounding noise: `100·ε·max(‖x̄‖, 1)`.
pub fn error_floor(xbar: &Point) -> f64 {
    100.0 * f64::EPSILON * xbar.norm().max(1.0)
}

/// Rates of the outer iterates of `trace` measured against the limit `xbar`.
pub fn analyze_trace(trace: &Trace, xbar: &Point, pbar: usize) -> Result<RateReport> {
    let errors: Vec<f64> = trace
        .outer_iterates()
        .iter()
        .map(|x| (x - xbar).norm())
        .collect();
    analyze_errors(&errors, pbar, error_floor(xbar))
}

pub fn analyze_errors(errors: &[f64], pbar: usize, floor: f64) -> Result<RateReport> {
    let fejer_ok = errors.windows(2).all(|w| w[1] <= w[0] + FEJER_SLACK);
    let usable: Vec<f64> = errors
        .iter()
        .copied()
        .take_while(|&e| e > floor && e.is_finite())
        .collect();
    if usable.len() < MIN_USABLE_ERRORS {
        return Err(Error::InsufficientData {
            usable: usable.len(),
            needed: MIN_USABLE_ERRORS,
        });
    }
    let q_ratios: Vec<f64> = usable.windows(2).map(|w| w[1] / w[0]).collect();
    let tail_q = tail(&q_ratios);
    let pairs = &usable.windows(2).collect::<Vec<_>>()[q_ratios.len() - tail_q.len()..];
    let logs: Vec<(f64, f64)> = pairs.iter().map(|w| (w[0].ln(), w[1].ln())).collect();
    let pbar_ratios = if pbar == 0 {
        Vec::new()
    } else {
        usable
            .iter()
            .zip(usable.iter().skip(pbar))
            .map(|(a, b)| b / a)
            .collect()
    };
    Ok(RateReport {
        tail_qlinear_rate: geometric_mean(tail_q),
        estimated_order: slope(&logs),
        q_ratios,
        fejer_ok,
        pbar_ratios,
        usable: usable.len(),
    })
}

fn tail(v: &[f64]) -> &[f64] {
    let n = v.len();
    let k = (n / 4).max(TAIL_MIN).min(n);
    &v[n - k..]
}

fn geometric_mean(v: &[f64]) -> f64 {
    (v.iter().map(|r| r.ln()).sum::<f64>() / v.len() as f64).exp()
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}
