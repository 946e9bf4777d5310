//! Uniaxial crystal optics.
//!
//! Refractive indices come from two-term Sellmeier relations, one per
//! polarization. The extraordinary index at an angle `theta` from the optic
//! axis follows the index ellipse
//!
//! ```text
//! 1 / n(theta)^2 = cos^2(theta) / n_o^2 + sin^2(theta) / n_e^2
//! ```
//!
//! Type-I phase matching pairs an extraordinary pump with two ordinary
//! daughters. Everything here works at the degenerate point
//! `lambda_s = lambda_i = 2 lambda_p`. Angles are radians, wavelengths are
//! micrometers and wavenumbers are inverse meters.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Built-in registry, shipped with the crate.
pub const DEFAULT_REGISTRY: &str = include_str!("../data/crystals.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Ordinary,
    Extraordinary,
}

/// Coefficients of `n^2 = a + b / (lambda^2 - c) - d lambda^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SellmeierCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl SellmeierCoefficients {
    /// Evaluates the raw relation without any wavelength range check.
    pub fn index(&self, lambda_um: f64) -> Result<f64> {
        let l2 = lambda_um * lambda_um;
        let denom = l2 - self.c;
        if denom.abs() <= 1e-12 * self.c.abs().max(1.0) {
            return Err(Error::Model(format!(
                "Sellmeier pole at lambda = {lambda_um} um"
            )));
        }
        let n2 = self.a + self.b / denom - self.d * l2;
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::Model(format!(
                "negative Sellmeier radicand {n2} at lambda = {lambda_um} um"
            )));
        }
        Ok(n2.sqrt())
    }
}

/// Dispersion of a uniaxial crystal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierModel {
    pub name: String,
    pub ordinary: SellmeierCoefficients,
    pub extraordinary: SellmeierCoefficients,
    /// Accepted wavelength interval in micrometers.
    pub validity_um: (f64, f64),
}

impl SellmeierModel {
    /// The BBO entry of the built-in registry.
    pub fn bbo() -> Self {
        CrystalRegistry::builtin()
            .and_then(|r| r.get("BBO"))
            .expect("built-in registry carries a valid BBO entry")
    }

    fn coefficients(&self, pol: Polarization) -> &SellmeierCoefficients {
        match pol {
            Polarization::Ordinary => &self.ordinary,
            Polarization::Extraordinary => &self.extraordinary,
        }
    }

    /// Principal index for the given polarization.
    pub fn refractive_index(&self, pol: Polarization, lambda_um: f64) -> Result<f64> {
        let (lo, hi) = self.validity_um;
        if !(lambda_um >= lo && lambda_um <= hi) {
            return Err(Error::Domain(format!(
                "wavelength {lambda_um} um outside [{lo}, {hi}] um for {}",
                self.name
            )));
        }
        self.coefficients(pol).index(lambda_um)
    }

    /// Extraordinary index for propagation at `theta` from the optic axis.
    pub fn index_e_at_angle(&self, theta: f64, lambda_um: f64) -> Result<f64> {
        check_theta(theta)?;
        let n_o = self.refractive_index(Polarization::Ordinary, lambda_um)?;
        let n_e = self.refractive_index(Polarization::Extraordinary, lambda_um)?;
        let (s, c) = theta.sin_cos();
        Ok(1.0 / (c * c / (n_o * n_o) + s * s / (n_e * n_e)).sqrt())
    }

    /// Closed-form `d n_e(theta) / d theta`.
    pub fn index_e_slope(&self, theta: f64, lambda_um: f64) -> Result<f64> {
        let n = self.index_e_at_angle(theta, lambda_um)?;
        let n_o = self.refractive_index(Polarization::Ordinary, lambda_um)?;
        let n_e = self.refractive_index(Polarization::Extraordinary, lambda_um)?;
        Ok(-0.5 * n.powi(3) * (2.0 * theta).sin() * (1.0 / (n_e * n_e) - 1.0 / (n_o * n_o)))
    }

    /// Walk-off angle from `n tan(rho) = -dn/dtheta`.
    ///
    /// Positive for a negative uniaxial crystal; by convention a positive
    /// angle tilts the pump Poynting vector toward +x.
    pub fn walkoff_angle(&self, theta: f64, lambda_p_um: f64) -> Result<f64> {
        let n = self.index_e_at_angle(theta, lambda_p_um)?;
        let dn = self.index_e_slope(theta, lambda_p_um)?;
        Ok((-dn / n).atan())
    }

    /// Pump and daughter wavenumbers for degenerate type-I interaction.
    pub fn wavevectors(&self, theta: f64, lambda_p_um: f64) -> Result<Wavevectors> {
        let n_p = self.index_e_at_angle(theta, lambda_p_um)?;
        let lambda_s_um = 2.0 * lambda_p_um;
        let n_s = self.refractive_index(Polarization::Ordinary, lambda_s_um)?;
        let k_s = wavenumber(n_s, lambda_s_um);
        Ok(Wavevectors {
            k_p: wavenumber(n_p, lambda_p_um),
            k_s,
            k_i: k_s,
        })
    }

    /// Longitudinal mismatch `k_p - k_sz - k_iz` for a signal at transverse
    /// wavenumber `q0` and its idler at `-q0`.
    pub fn longitudinal_mismatch(&self, theta: f64, lambda_p_um: f64, q0: f64) -> Result<f64> {
        let k = self.wavevectors(theta, lambda_p_um)?;
        if q0.abs() >= k.k_s {
            return Err(Error::Evanescent(format!(
                "transverse wavenumber {q0} exceeds k_s = {}",
                k.k_s
            )));
        }
        let kz = (k.k_s * k.k_s - q0 * q0).sqrt();
        Ok(k.k_p - 2.0 * kz)
    }

    /// Validates the physical invariants of the model over its range.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.validity_um;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Registry(format!(
                "{}: invalid validity range [{lo}, {hi}]",
                self.name
            )));
        }
        const SAMPLES: usize = 200;
        for i in 0..=SAMPLES {
            let lambda = lo + (hi - lo) * i as f64 / SAMPLES as f64;
            let n_o = self.refractive_index(Polarization::Ordinary, lambda)?;
            let n_e = self.refractive_index(Polarization::Extraordinary, lambda)?;
            if n_o <= 1.0 || n_e <= 1.0 {
                return Err(Error::Registry(format!(
                    "{}: index below unity at {lambda} um",
                    self.name
                )));
            }
            if n_o <= n_e {
                return Err(Error::Registry(format!(
                    "{}: not negative uniaxial at {lambda} um (n_o = {n_o}, n_e = {n_e})",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain(format!(
            "propagation angle {theta} rad outside [0, pi/2]"
        )));
    }
    Ok(())
}

/// `2 pi n / lambda` in inverse meters for `lambda` in micrometers.
pub fn wavenumber(n: f64, lambda_um: f64) -> f64 {
    2.0 * PI * n / (lambda_um * 1e-6)
}

/// Wavenumbers (inverse meters) inside the crystal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavevectors {
    pub k_p: f64,
    pub k_s: f64,
    pub k_i: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Collinear,
    NonCollinear,
}

/// Nonlinear crystal: dispersion, cut angle and length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrystalConfig {
    pub sellmeier: SellmeierModel,
    /// Angle between optic axis and pump propagation, radians.
    pub theta: f64,
    /// Crystal length in meters.
    pub length: f64,
    pub geometry: Geometry,
}

impl CrystalConfig {
    pub fn new(sellmeier: SellmeierModel, theta: f64, length: f64, geometry: Geometry) -> Result<Self> {
        if !(theta > 0.0 && theta < FRAC_PI_2) {
            return Err(Error::Domain(format!("cut angle {theta} rad outside (0, pi/2)")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Domain(format!("crystal length {length} m must be positive")));
        }
        Ok(Self {
            sellmeier,
            theta,
            length,
            geometry,
        })
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.sellmeier.clone(), self.theta, length, self.geometry)
    }
}

/// Bisection bracket for the cut angle, degrees.
const BRACKET_DEG: (f64, f64) = (0.1, 89.9);
const MAX_BISECTIONS: usize = 200;

/// Cut angle at which a degenerate pair with transverse wavenumbers
/// `+q0` / `-q0` is phase matched. `q0 = 0` is collinear phase matching.
pub fn phase_match_angle(model: &SellmeierModel, lambda_p_um: f64, q0: f64) -> Result<f64> {
    let f = |theta: f64| model.longitudinal_mismatch(theta, lambda_p_um, q0);
    let mut lo = BRACKET_DEG.0.to_radians();
    let mut hi = BRACKET_DEG.1.to_radians();
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoPhaseMatching(format!(
            "mismatch keeps sign over [{}, {}] deg at lambda_p = {lambda_p_um} um, q0 = {q0} 1/m",
            BRACKET_DEG.0, BRACKET_DEG.1
        )));
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Transverse wavenumber of the degenerate emission ring at a fixed cut
/// angle: the `q0` solving `k_p = 2 sqrt(k_s^2 - q0^2)`.
pub fn ring_radius(model: &SellmeierModel, theta: f64, lambda_p_um: f64) -> Result<f64> {
    let k = model.wavevectors(theta, lambda_p_um)?;
    let half = 0.5 * k.k_p;
    if half > k.k_s {
        return Err(Error::NoPhaseMatching(format!(
            "k_p / 2 = {half} exceeds k_s = {} at theta = {} deg",
            k.k_s,
            theta.to_degrees()
        )));
    }
    Ok((k.k_s * k.k_s - half * half).sqrt())
}

#[derive(Debug, Deserialize)]
struct RegistryEntry {
    #[serde(default)]
    description: String,
    validity_um: (f64, f64),
    ordinary: SellmeierCoefficients,
    extraordinary: SellmeierCoefficients,
    check: Option<ReferenceCheck>,
}

/// Known collinear phase-matching angle an entry must reproduce.
#[derive(Debug, Clone, Copy, Deserialize)]
struct ReferenceCheck {
    lambda_p_um: f64,
    theta_deg: f64,
    tolerance_deg: f64,
}

/// Crystal name to dispersion model.
#[derive(Debug, Clone, Default)]
pub struct CrystalRegistry {
    entries: BTreeMap<String, (String, SellmeierModel)>,
}

impl CrystalRegistry {
    pub fn builtin() -> Result<Self> {
        Self::parse(DEFAULT_REGISTRY)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Registry(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses and validates every entry.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: BTreeMap<String, RegistryEntry> =
            toml::from_str(text).map_err(|e| Error::Registry(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for (name, entry) in raw {
            let model = SellmeierModel {
                name: name.clone(),
                ordinary: entry.ordinary,
                extraordinary: entry.extraordinary,
                validity_um: entry.validity_um,
            };
            model.validate()?;
            if let Some(check) = entry.check {
                let theta = phase_match_angle(&model, check.lambda_p_um, 0.0)?.to_degrees();
                if (theta - check.theta_deg).abs() > check.tolerance_deg {
                    return Err(Error::Registry(format!(
                        "{name}: collinear phase matching at {theta:.4} deg, expected {} +/- {} deg",
                        check.theta_deg, check.tolerance_deg
                    )));
                }
            }
            entries.insert(name, (entry.description, model));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, name: &str) -> Result<SellmeierModel> {
        self.entries
            .get(name)
            .map(|(_, m)| m.clone())
            .ok_or_else(|| Error::Registry(format!("unknown crystal '{name}'")))
    }

    pub fn description(&self, name: &str) -> Option<&str> {
        self.entries.get(name).map(|(d, _)| d.as_str())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}
