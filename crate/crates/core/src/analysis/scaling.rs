use serde::{Deserialize, Serialize};

use super::sweep::{SweepAxis, SweepResult};
use crate::error::{Error, Result};

/// Walk-off angles, in degrees, sampled for scaling fits by default.
pub const DEFAULT_SCALING_RHO_DEG: [f64; 7] = [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0];

/// Sideband probabilities at or below this are treated as numerical noise.
pub const SCALING_FLOOR: f64 = 1e-14;

/// Least-squares fit of `log P(n)` against `log tan(rho)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub order: i32,
    pub rho: Vec<f64>,
    pub probability: Vec<f64>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
}

impl ScalingFit {
    /// Slope the power law predicts, `2 |n|`.
    pub fn expected_slope(&self) -> f64 {
        2.0 * self.order.abs() as f64
    }
}

pub fn fit_scaling_law(sweep: &SweepResult, n: i32) -> Result<ScalingFit> {
    if sweep.axis != SweepAxis::Walkoff {
        return Err(Error::Parameter("scaling fits need a walk-off sweep".into()));
    }
    let p = sweep.sideband(n)?;
    let (rho, probability): (Vec<f64>, Vec<f64>) = sweep
        .values
        .iter()
        .zip(&p)
        .filter(|(r, p)| **r > 0.0 && **p > SCALING_FLOOR)
        .map(|(r, p)| (*r, *p))
        .unzip();
    if rho.len() < 5 {
        return Err(Error::Fit(format!(
            "P({n}) exceeds the {SCALING_FLOOR:e} floor at only {} walk-off values, need 5",
            rho.len()
        )));
    }
    let x: Vec<f64> = rho.iter().map(|r| r.tan().ln()).collect();
    let y: Vec<f64> = probability.iter().map(|p| p.ln()).collect();
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("walk-off values do not spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let slope_stderr = (rss / (m - 2.0) / sxx).sqrt();
    Ok(ScalingFit {
        order: n,
        rho,
        probability,
        slope,
        slope_stderr,
        intercept,
    })
}
