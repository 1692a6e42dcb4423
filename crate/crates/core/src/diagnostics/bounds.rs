use crate::{Error, Result};

/// Constants of the linear-rate theory for `m` sets, metric-inequality
/// constant `beta` and relaxation `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedBounds {
    /// Per-outer-iteration contraction of `d(x, K)` for the block scheme.
    pub rho_block: f64,
    /// Step-length constant `c` in `‖x_{i+1} − x_i‖ ≤ c·d(x_i, K)`.
    pub c_block: f64,
    /// `√(β² − (1−τ)²)/β`
    pub rho_relaxed: f64,
    /// `β/(1 − ρ_relaxed)`
    pub l_relaxed: f64,
    /// `√(β² − ¼)/β`
    pub rho_bar: f64,
    /// `β/(1 − ρ̄)`
    pub l_bar: f64,
    /// `8·L̄·τ`, the bound on the memory-depth step ratio.
    pub contraction: f64,
    /// `rho_block ≥ 1`: the block bound says nothing.
    pub bound_vacuous: bool,
}

pub fn predicted_bounds(m: usize, beta: f64, tau: f64) -> Result<PredictedBounds> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beta {beta} must be at least 1"
        )));
    }
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::InvalidArgument(format!("tau {tau} outside [0, 1)")));
    }
    let mf = m as f64;
    let b2 = beta * beta;
    let rho_sq = 1.0 + 1.0 / (b2 * mf.powi(3)) + 1.0 / (4.0 * b2 * b2 * mf.powi(6))
        - 1.0 / (b2 * mf * mf)
        + 1.0 / (2.0 * b2 * beta * mf.powi(5))
        - 1.0 / (16.0 * b2 * b2 * mf.powi(8))
        + 1.0 / (16.0 * b2 * b2 * mf.powi(6));
    let rho_block = rho_sq.max(0.0).sqrt();
    let inner = 1.0 + 1.0 / (4.0 * mf.powi(3) * b2);
    let c_block = mf.sqrt() * (inner * inner + 1.0 / (16.0 * mf.powi(6) * b2 * b2)).sqrt();
    let rho_relaxed = (b2 - (1.0 - tau).powi(2)).max(0.0).sqrt() / beta;
    let rho_bar = (b2 - 0.25).sqrt() / beta;
    let l_bar = beta / (1.0 - rho_bar);
    Ok(PredictedBounds {
        rho_block,
        c_block,
        rho_relaxed,
        l_relaxed: beta / (1.0 - rho_relaxed),
        rho_bar,
        l_bar,
        contraction: 8.0 * l_bar * tau,
        bound_vacuous: rho_block >= 1.0,
    })
}
