//! Sweeps over focusing and walk-off, sideband scaling fits, the
//! Bessel-expansion cross-check and pump-astigmatism optimization.

mod astig;
mod jacobi;
mod scaling;
mod sweep;

pub use astig::{optimize_astigmatism, AstigmatismResult, Objective, DEFAULT_BETA_RANGE, DEFAULT_BETA_TOLERANCE};
pub use jacobi::{bessel_truncation, jacobi_anger_sideband};
pub use scaling::{fit_scaling_law, ScalingFit, DEFAULT_SCALING_RHO_DEG, SCALING_FLOOR};
pub use sweep::{sweep_focusing, sweep_walkoff, SweepAxis, SweepOptions, SweepResult, SweepSnapshot};

use serde::{Deserialize, Serialize};

use crate::biphoton::{azimuthal_kernel, PolarGrid, Resolution};
use crate::dispersion::CrystalConfig;
use crate::error::Result;
use crate::oam::{oam_spectrum, OamSpectrum};
use crate::pump::PumpConfig;

/// Sideband orders reported per sweep point.
pub const SIDEBANDS: [i32; 7] = [-3, -2, -1, 0, 1, 2, 3];

/// How the polar grid is sized for each run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridSpec {
    /// `Resolution::auto` for each configuration.
    #[default]
    Auto,
    Fixed(Resolution),
}

impl GridSpec {
    pub fn resolve(&self, crystal: &CrystalConfig, pump: &PumpConfig, l_max: i32) -> Result<Resolution> {
        match self {
            GridSpec::Auto => Resolution::auto(crystal, pump, l_max.max(0) as usize),
            GridSpec::Fixed(r) => Ok(*r),
        }
    }

    pub fn grid(&self, crystal: &CrystalConfig, pump: &PumpConfig, l_max: i32) -> Result<PolarGrid> {
        PolarGrid::for_configuration(crystal, pump, self.resolve(crystal, pump, l_max)?)
    }
}

/// Full pipeline: grid, kernel, spectrum.
pub fn spectrum(crystal: &CrystalConfig, pump: &PumpConfig, grid: GridSpec, l_max: i32) -> Result<OamSpectrum> {
    let g = grid.grid(crystal, pump, l_max)?;
    let field = azimuthal_kernel(crystal, pump, &g)?;
    oam_spectrum(&field, l_max)
}

/// In-medium Rayleigh range `pi w_p^2 n_e(theta) / lambda_p`, in meters.
pub fn rayleigh_range(crystal: &CrystalConfig, pump: &PumpConfig) -> Result<f64> {
    let n = crystal.sellmeier.index_e_at_angle(crystal.theta, pump.lambda_p)?;
    Ok(std::f64::consts::PI * pump.waist * pump.waist * n / (pump.lambda_p * 1e-6))
}

/// `P(n)` for `n` in `SIDEBANDS`.
pub fn sideband_probabilities(spec: &OamSpectrum) -> [f64; 7] {
    SIDEBANDS.map(|n| spec.total_oam_probability(spec.l_tot_pump + n))
}
