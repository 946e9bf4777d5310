//! Slow, direct references for the test suites.
//!
//! Nothing here shares code with the fast path beyond the amplitude
//! itself: the radial integral is a plain double loop over
//! [`TwoPhoton::amplitude`] and the OAM projection is a Riemann sum with
//! explicit exponentials.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::biphoton::{PolarGrid, TwoPhoton};
use crate::dispersion::SellmeierModel;
use crate::error::{Error, Result};
use crate::oam::OamSpectrum;
use crate::pump::PumpConfig;
use crate::dispersion::CrystalConfig;

/// Largest azimuthal grid the brute-force projection accepts.
pub const MAX_ORACLE_AZIMUTHAL: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub oracle: f64,
    pub pipeline: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    /// `|a - b| / max(|a|, |b|, 1e-30)` against `tolerance`.
    pub fn compare(quantity: impl Into<String>, oracle: f64, pipeline: f64, tolerance: f64) -> Self {
        let scale = oracle.abs().max(pipeline.abs()).max(1e-30);
        let deviation = (oracle - pipeline).abs() / scale;
        Self::with_deviation(quantity, oracle, pipeline, deviation, tolerance)
    }

    fn with_deviation(quantity: impl Into<String>, oracle: f64, pipeline: f64, deviation: f64, tolerance: f64) -> Self {
        Self {
            quantity: quantity.into(),
            oracle,
            pipeline,
            deviation,
            tolerance,
            pass: deviation <= tolerance,
        }
    }
}

/// Joint spectrum by direct quadrature, no FFT.
pub fn brute_force_spectrum(
    crystal: &CrystalConfig,
    pump: &PumpConfig,
    grid: &PolarGrid,
    l_max: i32,
) -> Result<OamSpectrum> {
    let n = grid.n_azimuthal;
    if n > MAX_ORACLE_AZIMUTHAL {
        return Err(Error::Parameter(format!(
            "brute-force projection is limited to {MAX_ORACLE_AZIMUTHAL} azimuthal nodes, got {n}"
        )));
    }
    let model = TwoPhoton::new(crystal, pump)?;
    let step = 2.0 * PI / n as f64;
    let mut kernel = vec![Complex64::new(0.0, 0.0); n * n];
    for js in 0..n {
        for ji in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (qa, wa) in grid.radial_nodes.iter().zip(&grid.radial_weights) {
                for (qb, wb) in grid.radial_nodes.iter().zip(&grid.radial_weights) {
                    let phi = model.amplitude(*qa, step * js as f64, *qb, step * ji as f64);
                    acc += phi * (wa * qa * wb * qb);
                }
            }
            kernel[js * n + ji] = acc;
        }
    }
    let band = (n / 2) as i32;
    let mut full = Vec::with_capacity(n * n);
    for l_s in -band..band {
        for l_i in -band..band {
            let mut acc = Complex64::new(0.0, 0.0);
            for js in 0..n {
                for ji in 0..n {
                    let arg = -step * (l_s as f64 * js as f64 + l_i as f64 * ji as f64);
                    acc += kernel[js * n + ji] * Complex64::from_polar(1.0, arg);
                }
            }
            full.push((acc * step * step).norm_sqr());
        }
    }
    OamSpectrum::from_band(full, band, l_max, pump.oam)
}

/// Largest elementwise difference over the band, relative to the peak.
pub fn spectrum_agreement(oracle: &OamSpectrum, pipeline: &OamSpectrum, tolerance: f64) -> Result<OracleReport> {
    if oracle.band != pipeline.band {
        return Err(Error::Parameter("spectra resolve different bands".into()));
    }
    let b = oracle.band;
    let mut peak: f64 = 0.0;
    let mut worst: f64 = 0.0;
    let (mut at_o, mut at_p) = (0.0, 0.0);
    for l_s in -b..b {
        for l_i in -b..b {
            let o = oracle.band_entry(l_s, l_i).unwrap_or(0.0);
            let p = pipeline.band_entry(l_s, l_i).unwrap_or(0.0);
            peak = peak.max(o.abs()).max(p.abs());
            if (o - p).abs() >= worst {
                worst = (o - p).abs();
                at_o = o;
                at_p = p;
            }
        }
    }
    let deviation = worst / peak.max(1e-30);
    Ok(OracleReport::with_deviation("spectrum elementwise", at_o, at_p, deviation, tolerance))
}

/// Walk-off from a central difference of `n_e(theta)` against the analytic slope.
pub fn walkoff_finite_difference(model: &SellmeierModel, theta: f64, lambda_p: f64, tolerance: f64) -> Result<OracleReport> {
    let h = 1e-5;
    let plus = model.index_e_at_angle(theta + h, lambda_p)?;
    let minus = model.index_e_at_angle(theta - h, lambda_p)?;
    let n = model.index_e_at_angle(theta, lambda_p)?;
    let slope = (plus - minus) / (2.0 * h);
    let rho_fd = (-slope / n).atan();
    let rho = model.walkoff_angle(theta, lambda_p)?;
    Ok(OracleReport::compare("walk-off angle", rho_fd, rho, tolerance))
}

/// `S[l_s, l_i]` against `S[l_i, l_s]` over the band, relative to the peak.
pub fn exchange_symmetry(spec: &OamSpectrum, tolerance: f64) -> OracleReport {
    let b = spec.band;
    let mut peak: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for l_s in -b..b {
        for l_i in -b..b {
            let v = spec.band_entry(l_s, l_i).unwrap_or(0.0);
            let w = spec.band_entry(l_i, l_s).unwrap_or(0.0);
            peak = peak.max(v);
            worst = worst.max((v - w).abs());
        }
    }
    OracleReport::with_deviation("exchange symmetry", 0.0, worst, worst / peak.max(1e-30), tolerance)
}

/// Largest `|P(n) - P(-n)|` for `0 < n <= n_max`, in absolute probability.
pub fn mirror_symmetry(spec: &OamSpectrum, n_max: i32, tolerance: f64) -> OracleReport {
    let l = spec.l_tot_pump;
    let worst = (1..=n_max)
        .map(|n| (spec.total_oam_probability(l + n) - spec.total_oam_probability(l - n)).abs())
        .fold(0.0, f64::max);
    OracleReport::with_deviation("mirror symmetry", 0.0, worst, worst, tolerance)
}

/// Rotating the walk-off direction by `steps` grid spacings leaves `S`
/// unchanged; largest elementwise change relative to the peak.
pub fn rotation_covariance(
    crystal: &CrystalConfig,
    pump: &PumpConfig,
    grid: &PolarGrid,
    steps: usize,
    l_max: i32,
    tolerance: f64,
) -> Result<OracleReport> {
    let spec = |p: &PumpConfig| -> Result<OamSpectrum> {
        let field = crate::biphoton::azimuthal_kernel(crystal, p, grid)?;
        crate::oam::oam_spectrum(&field, l_max)
    };
    let mut rotated = pump.clone();
    rotated.walkoff_azimuth += grid.azimuthal_step() * steps as f64;
    let a = spec(pump)?;
    let b = spec(&rotated)?;
    let mut r = spectrum_agreement(&a, &b, tolerance)?;
    r.quantity = "rotation covariance".into();
    Ok(r)
}
