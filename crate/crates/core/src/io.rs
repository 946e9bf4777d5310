//! CSV and JSON forms of spectra, far-field maps and sweeps.
//!
//! CSV floats carry 17 significant digits. JSON floats use the shortest
//! representation that parses back to the same bits.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{SweepResult, SIDEBANDS};
use crate::error::{Error, Result};
use crate::farfield::IntensityMap;
use crate::oam::OamSpectrum;

pub const SCHEMA_VERSION: u32 = 1;

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub schema_version: u32,
    pub l_max: i32,
    pub l_tot_pump: i32,
    /// Window entries, row-major over `l_s` then `l_i`, both from `-l_max`.
    #[serde(rename = "S")]
    pub s: Vec<f64>,
    pub truncation_mass: f64,
    pub nyquist_mass: f64,
    pub f_leak: f64,
    /// `P(n)` for `|n - l_tot_pump| <= 2 l_max`.
    pub total_oam: BTreeMap<i32, f64>,
}

impl SpectrumDocument {
    pub fn new(spec: &OamSpectrum) -> Self {
        let reach = 2 * spec.l_max;
        let total_oam = (spec.l_tot_pump - reach..=spec.l_tot_pump + reach)
            .map(|n| (n, spec.total_oam_probability(n)))
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            l_max: spec.l_max,
            l_tot_pump: spec.l_tot_pump,
            s: spec.s.clone(),
            truncation_mass: spec.truncation_mass,
            nyquist_mass: spec.nyquist_mass(),
            f_leak: spec.f_leak(),
            total_oam,
        }
    }
}

/// Rows `l_s,l_i,S` over the window.
pub fn spectrum_csv(spec: &OamSpectrum) -> String {
    let mut out = String::from("l_s,l_i,S\n");
    for l_s in -spec.l_max..=spec.l_max {
        for l_i in -spec.l_max..=spec.l_max {
            let v = spec.get(l_s, l_i).unwrap_or(0.0);
            out.push_str(&format!("{l_s},{l_i},{}\n", fmt_f64(v)));
        }
    }
    out
}

/// Rows `n,P` of the total-OAM marginal.
pub fn total_oam_csv(distribution: &BTreeMap<i32, f64>) -> String {
    let mut out = String::from("l_tot,P\n");
    for (n, p) in distribution {
        out.push_str(&format!("{n},{}\n", fmt_f64(*p)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarfieldDocument {
    pub schema_version: u32,
    pub peak_q: f64,
    pub peak_phi: f64,
    /// Centroid in units of `1 / w_p`.
    pub centroid_x: f64,
    pub centroid_y: f64,
    pub waist_m: f64,
    pub n_radial: usize,
    pub n_azimuthal: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub normalization: String,
}

impl FarfieldDocument {
    pub fn new(map: &IntensityMap, q_min: f64, q_max: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            peak_q: map.peak.0,
            peak_phi: map.peak.1,
            centroid_x: map.centroid.0,
            centroid_y: map.centroid.1,
            waist_m: map.waist,
            n_radial: map.radial_nodes.len(),
            n_azimuthal: map.n_azimuthal,
            q_min,
            q_max,
            normalization: "peak".into(),
        }
    }
}

/// Rows `q_s,phi_s,intensity` in radial-major order.
pub fn farfield_csv(map: &IntensityMap) -> String {
    let mut out = String::from("q_s,phi_s,intensity\n");
    for (a, q) in map.radial_nodes.iter().enumerate() {
        for j in 0..map.n_azimuthal {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(*q),
                fmt_f64(map.azimuth(j)),
                fmt_f64(map.at(a, j))
            ));
        }
    }
    out
}

/// Rows `axis,f_leak,P(-3),...,P(3)`.
pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = format!("{},f_leak", sweep.axis.name());
    for n in SIDEBANDS {
        out.push_str(&format!(",P({n})"));
    }
    out.push('\n');
    for ((v, f), p) in sweep.values.iter().zip(&sweep.f_leak).zip(&sweep.sidebands) {
        out.push_str(&fmt_f64(*v));
        out.push(',');
        out.push_str(&fmt_f64(*f));
        for x in p {
            out.push(',');
            out.push_str(&fmt_f64(*x));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub schema_version: u32,
    pub sweep: SweepResult,
}

impl SweepDocument {
    pub fn new(sweep: &SweepResult) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            sweep: sweep.clone(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Parameter(format!("cannot encode JSON: {e}")))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parameter(format!("cannot decode JSON: {e}")))
}

/// Writes `text`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::Parameter(format!("{}: {e}", dir.display())))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::Parameter(format!("{}: {e}", path.display())))
}
