use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rayleigh_range, sideband_probabilities, spectrum, GridSpec};
use crate::biphoton::Resolution;
use crate::dispersion::CrystalConfig;
use crate::error::{Error, Result};
use crate::oam::DEFAULT_L_MAX;
use crate::pump::PumpConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    /// `sqrt(L / z_R)` at fixed pump waist.
    Focusing,
    /// Walk-off angle in radians.
    Walkoff,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Focusing => "sqrt_l_over_zr",
            SweepAxis::Walkoff => "rho_rad",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub grid: GridSpec,
    pub l_max: i32,
    /// Worker threads for independent points; 0 uses the global pool.
    pub threads: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            grid: GridSpec::Auto,
            l_max: DEFAULT_L_MAX,
            threads: 0,
        }
    }
}

/// Everything needed to rerun a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSnapshot {
    pub crystal: CrystalConfig,
    pub pump: PumpConfig,
    pub options: SweepOptions,
    /// Which parameter realizes the axis, and how.
    pub knob: String,
    pub rayleigh_convention: Option<String>,
    pub rayleigh_range_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub f_leak: Vec<f64>,
    /// `P(n)` for `n = -3..=3` at each point.
    pub sidebands: Vec<[f64; 7]>,
    /// Crystal length used at each point, in meters.
    pub lengths: Vec<f64>,
    pub resolutions: Vec<Resolution>,
    pub snapshot: SweepSnapshot,
}

impl SweepResult {
    /// `P(n)` across the sweep, `n` in `-3..=3`.
    pub fn sideband(&self, n: i32) -> Result<Vec<f64>> {
        if n.abs() > 3 {
            return Err(Error::Parameter(format!("sideband {n} is not recorded")));
        }
        Ok(self.sidebands.iter().map(|p| p[(n + 3) as usize]).collect())
    }
}

struct Point {
    f_leak: f64,
    sidebands: [f64; 7],
    length: f64,
    resolution: Resolution,
}

fn check_axis(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Parameter("sweep needs at least one value".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("sweep values must be finite".into()));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("sweep values must be strictly increasing".into()));
    }
    Ok(())
}

fn run_points<F>(values: &[f64], threads: usize, job: F) -> Result<Vec<Point>>
where
    F: Fn(f64) -> Result<Point> + Sync,
{
    let go = || values.par_iter().map(|&v| job(v)).collect::<Result<Vec<_>>>();
    if threads == 0 {
        return go();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?
        .install(go)
}

fn point(crystal: &CrystalConfig, pump: &PumpConfig, opts: &SweepOptions) -> Result<Point> {
    let resolution = opts.grid.resolve(crystal, pump, opts.l_max)?;
    let s = spectrum(crystal, pump, GridSpec::Fixed(resolution), opts.l_max)?;
    Ok(Point {
        f_leak: s.f_leak(),
        sidebands: sideband_probabilities(&s),
        length: crystal.length,
        resolution,
    })
}

fn collect(axis: SweepAxis, values: &[f64], points: Vec<Point>, snapshot: SweepSnapshot) -> SweepResult {
    SweepResult {
        axis,
        values: values.to_vec(),
        f_leak: points.iter().map(|p| p.f_leak).collect(),
        sidebands: points.iter().map(|p| p.sidebands).collect(),
        lengths: points.iter().map(|p| p.length).collect(),
        resolutions: points.iter().map(|p| p.resolution).collect(),
        snapshot,
    }
}

/// `f_leak` against `sqrt(L / z_R)`, holding `w_p` and setting
/// `L = z_R * value^2`. The crystal length passed in is ignored.
pub fn sweep_focusing(
    crystal: &CrystalConfig,
    pump: &PumpConfig,
    values: &[f64],
    opts: &SweepOptions,
) -> Result<SweepResult> {
    check_axis(values)?;
    if values.iter().any(|&v| !(v > 0.0 && v <= 2.0)) {
        return Err(Error::Parameter("focusing values must lie in (0, 2]".into()));
    }
    pump.validate()?;
    let z_r = rayleigh_range(crystal, pump)?;
    let points = run_points(values, opts.threads, |v| {
        let c = crystal.with_length(z_r * v * v)?;
        point(&c, pump, opts)
    })?;
    let snapshot = SweepSnapshot {
        crystal: crystal.clone(),
        pump: pump.clone(),
        options: *opts,
        knob: "crystal length L = z_R * value^2 at fixed pump waist".into(),
        rayleigh_convention: Some("z_R = pi * w_p^2 * n_e(theta) / lambda_p (in-medium)".into()),
        rayleigh_range_m: Some(z_r),
    };
    Ok(collect(SweepAxis::Focusing, values, points, snapshot))
}

/// Spectrum sideband probabilities against the walk-off angle (radians).
/// The walk-off of the pump passed in is ignored.
pub fn sweep_walkoff(
    crystal: &CrystalConfig,
    pump: &PumpConfig,
    rho_values: &[f64],
    opts: &SweepOptions,
) -> Result<SweepResult> {
    check_axis(rho_values)?;
    for &r in rho_values {
        pump.clone().with_walkoff(r).validate()?;
    }
    let points = run_points(rho_values, opts.threads, |r| {
        point(crystal, &pump.clone().with_walkoff(r), opts)
    })?;
    let snapshot = SweepSnapshot {
        crystal: crystal.clone(),
        pump: pump.clone(),
        options: *opts,
        knob: "pump walk-off angle rho".into(),
        rayleigh_convention: None,
        rayleigh_range_m: None,
    };
    Ok(collect(SweepAxis::Walkoff, rho_values, points, snapshot))
}
