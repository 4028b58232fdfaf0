use serde::{Deserialize, Serialize};

use super::sweep::{run_sweep, Axis, Observable, RowFlags, SweepConfig};
use crate::error::{FridgeError, Result};
use crate::models::ModelParams;

/// Cold-particle temperature as its bath coupling `p1` is switched off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct P1Extrapolation {
    /// Estimated `p1 -> 0` temperature.
    pub limit: f64,
    pub converged: bool,
    /// Temperatures never increase as `p1` decreases.
    pub monotone_from_above: bool,
    pub p1: Vec<f64>,
    pub t1: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Solves the stationary state along a decreasing `p1` sequence and
/// extrapolates linearly in `p1` through the last two points.
///
/// The estimate is accepted when the last two temperature differences
/// contract; otherwise it is returned with `converged = false`.
pub fn extrapolate_p1_limit(base: &ModelParams, p1_sequence: &[f64], tol: f64) -> Result<P1Extrapolation> {
    if p1_sequence.len() < 4 {
        return Err(FridgeError::InvalidSweep(
            "p1 extrapolation needs at least four points".into(),
        ));
    }
    if p1_sequence.iter().any(|&p| !(p > 0.0))
        || p1_sequence.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(FridgeError::InvalidSweep(
            "p1 sequence must be positive and strictly decreasing".into(),
        ));
    }

    let config = SweepConfig::new(*base, Axis::new("p1", p1_sequence.to_vec())?)
        .with_outputs(vec![Observable::Temperature(1)])
        .with_label("p1-extrapolation")
        .with_tol(tol);
    let table = run_sweep(&config)?;
    if let Some(row) = table.rows.iter().find(|r| r.flags.contains(RowFlags::FAILED)) {
        return Err(FridgeError::Numerical(
            row.error.clone().unwrap_or_else(|| "steady state failed".into()),
        ));
    }
    let t1 = table.column("T1").expect("T1 column");
    let residuals = table.column("residual").expect("residual column");

    let n = t1.len();
    let diffs: Vec<f64> = t1.windows(2).map(|w| w[0] - w[1]).collect();
    let scale = t1.iter().fold(0.0f64, |a, t| a.max(t.abs())).max(f64::MIN_POSITIVE);
    let negligible = |d: f64| d.abs() <= NOISE * scale;
    // Only the tail has to be in the linear regime.
    let (d_prev, d_last) = (diffs[diffs.len() - 2], diffs[diffs.len() - 1]);
    let contracting = negligible(d_last) || d_last.abs() < d_prev.abs();
    let all_converged = table.rows.iter().all(|r| !r.flags.contains(RowFlags::UNCONVERGED));
    let monotone_from_above = diffs.iter().all(|&d| d >= -NOISE * scale);

    let (p_prev, p_last) = (p1_sequence[n - 2], p1_sequence[n - 1]);
    let slope = (t1[n - 2] - t1[n - 1]) / (p_prev - p_last);
    let limit = t1[n - 1] - slope * p_last;

    Ok(P1Extrapolation {
        limit,
        converged: contracting && all_converged && limit.is_finite(),
        monotone_from_above,
        p1: p1_sequence.to_vec(),
        t1,
        residuals,
    })
}

/// Relative size of temperature changes treated as solver noise.
const NOISE: f64 = 1e-10;

/// `count` values decreasing by a factor of ten from `start`.
pub fn decades(start: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * 10f64.powi(-(k as i32))).collect()
}
