//! Pump angular spectrum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest pump OAM accepted.
pub const MAX_PUMP_OAM: i32 = 8;
/// Walk-off angles at or beyond this many radians are rejected.
pub const MAX_WALKOFF: f64 = 0.2;

/// How the Gaussian exponent is formed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvelopeMode {
    /// `exp(-w^2 (qx^2 + qy^2) / 4)`.
    #[default]
    Isotropic,
    /// `exp(-w^2 (qx + qy)^2 / 4)`, kept only for comparison runs.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpConfig {
    /// Vacuum wavelength in micrometers.
    pub lambda_p: f64,
    /// Beam waist in meters.
    pub waist: f64,
    /// Laguerre-Gauss azimuthal index (radial index is always zero).
    pub oam: i32,
    /// Walk-off angle in radians.
    pub walkoff: f64,
    /// Direction of the walk-off in the transverse plane, measured from +x.
    #[serde(default)]
    pub walkoff_azimuth: f64,
    /// Dimensionless astigmatism strength; zero disables it.
    #[serde(default)]
    pub astigmatism: f64,
    #[serde(default)]
    pub envelope: EnvelopeMode,
}

impl PumpConfig {
    /// Gaussian pump without walk-off or astigmatism.
    pub fn gaussian(lambda_p: f64, waist: f64) -> Self {
        Self {
            lambda_p,
            waist,
            oam: 0,
            walkoff: 0.0,
            walkoff_azimuth: 0.0,
            astigmatism: 0.0,
            envelope: EnvelopeMode::Isotropic,
        }
    }

    pub fn with_walkoff(mut self, rho: f64) -> Self {
        self.walkoff = rho;
        self
    }

    pub fn with_oam(mut self, oam: i32) -> Self {
        self.oam = oam;
        self
    }

    pub fn with_astigmatism(mut self, beta: f64) -> Self {
        self.astigmatism = beta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.waist > 0.0) || !self.waist.is_finite() {
            return Err(Error::Parameter(format!("pump waist {} m must be positive", self.waist)));
        }
        if !(self.lambda_p > 0.0) {
            return Err(Error::Parameter(format!(
                "pump wavelength {} um must be positive",
                self.lambda_p
            )));
        }
        if self.oam.abs() > MAX_PUMP_OAM {
            return Err(Error::Parameter(format!(
                "pump OAM {} exceeds +/-{MAX_PUMP_OAM}",
                self.oam
            )));
        }
        if !(self.walkoff.abs() < MAX_WALKOFF) {
            return Err(Error::Parameter(format!(
                "walk-off {} rad outside (-{MAX_WALKOFF}, {MAX_WALKOFF})",
                self.walkoff
            )));
        }
        if !self.astigmatism.is_finite() || !self.walkoff_azimuth.is_finite() {
            return Err(Error::Parameter("non-finite pump parameter".into()));
        }
        Ok(())
    }

    /// Gaussian exponent `w^2 q^2 / 4` above which the isotropic envelope is
    /// treated as zero. Scales with `|l_p|` so the polynomial prefactor of a
    /// Laguerre-Gauss pump cannot lift the tail back above ~1e-22 of peak.
    pub fn exponent_cutoff(&self) -> Option<f64> {
        match self.envelope {
            EnvelopeMode::Isotropic => Some(60.0 + 4.0 * f64::from(self.oam.abs())),
            EnvelopeMode::Literal => None,
        }
    }
}

/// Pump amplitude at transverse wavevector `(qpx, qpy)`.
///
/// The walk-off phase `exp(i qpx tan(rho) z)` is not applied here; it is part
/// of the phase mismatch.
pub fn pump_envelope(cfg: &PumpConfig, qpx: f64, qpy: f64) -> Complex64 {
    let q2 = qpx * qpx + qpy * qpy;
    let w2 = cfg.waist * cfg.waist;
    let exponent = match cfg.envelope {
        EnvelopeMode::Isotropic => w2 * q2 / 4.0,
        EnvelopeMode::Literal => w2 * (qpx + qpy).powi(2) / 4.0,
    };
    let mut amp = Complex64::new((-exponent).exp(), 0.0);
    if cfg.oam != 0 {
        let radial = (cfg.waist * q2.sqrt() / std::f64::consts::SQRT_2).powi(cfg.oam.abs());
        let phase = f64::from(cfg.oam) * qpy.atan2(qpx);
        amp *= Complex64::from_polar(radial, phase);
    }
    if cfg.astigmatism != 0.0 {
        amp *= Complex64::from_polar(1.0, cfg.astigmatism * w2 * (qpx * qpx - qpy * qpy) / 4.0);
    }
    amp
}
