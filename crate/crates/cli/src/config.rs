//! Run configuration: TOML (or a JSON snapshot) with units in the key names.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spdc_oam::analysis::{GridSpec, Objective, DEFAULT_BETA_TOLERANCE, DEFAULT_SCALING_RHO_DEG};
use spdc_oam::biphoton::Resolution;
use spdc_oam::dispersion::{phase_match_angle, CrystalConfig, CrystalRegistry, Geometry};
use spdc_oam::oam::DEFAULT_L_MAX;
use spdc_oam::pump::{EnvelopeMode, PumpConfig};

use crate::error::CliError;

pub const AUTO_THETA: &str = "auto-phase-match";
pub const AUTO_WALKOFF: &str = "auto-from-dispersion";
pub const OUTPUT_DIR_ENV: &str = "SPDC_OAM_OUTPUT_DIR";
const FALLBACK_OUTPUT_DIR: &str = "spdc-oam-out";

/// A number, or a keyword asking for the value to be derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Setting {
    Value(f64),
    Keyword(String),
}

impl Setting {
    pub fn parse(text: &str) -> Self {
        match text.trim().parse::<f64>() {
            Ok(v) => Setting::Value(v),
            Err(_) => Setting::Keyword(text.trim().to_string()),
        }
    }

    fn value_or(&self, keyword: &str, field: &str) -> Result<Option<f64>, CliError> {
        match self {
            Setting::Value(v) => Ok(Some(*v)),
            Setting::Keyword(k) if k == keyword => Ok(None),
            Setting::Keyword(k) => Err(CliError::Config(format!(
                "{field}: expected a number or \"{keyword}\", got \"{k}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrystalSection {
    pub name: String,
    /// Extra crystal registry file; the built-in one is used otherwise.
    pub registry: Option<PathBuf>,
    pub theta_deg: Setting,
    /// Transverse wavenumber the automatic cut angle phase-matches, 1/m.
    pub q0_per_m: f64,
    pub length_mm: f64,
    pub geometry: Geometry,
}

impl Default for CrystalSection {
    fn default() -> Self {
        Self {
            name: "BBO".into(),
            registry: None,
            theta_deg: Setting::Keyword(AUTO_THETA.into()),
            q0_per_m: 0.0,
            length_mm: 3.0,
            geometry: Geometry::Collinear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpSection {
    pub wavelength_nm: f64,
    pub waist_um: f64,
    pub oam: i32,
    pub walkoff_deg: Setting,
    pub walkoff_azimuth_deg: f64,
    pub astigmatism: f64,
    pub envelope: EnvelopeMode,
}

impl Default for PumpSection {
    fn default() -> Self {
        Self {
            wavelength_nm: 355.0,
            waist_um: 200.0,
            oam: 0,
            walkoff_deg: Setting::Keyword(AUTO_WALKOFF.into()),
            walkoff_azimuth_deg: 0.0,
            astigmatism: 0.0,
            envelope: EnvelopeMode::Isotropic,
        }
    }
}

/// Grid sizes; a missing size is chosen from the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n_radial: Option<usize>,
    pub n_azimuthal: Option<usize>,
    pub l_max: i32,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n_radial: None,
            n_azimuthal: None,
            l_max: DEFAULT_L_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: None,
            formats: vec![Format::Json, Format::Csv],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// `sqrt(L / z_R)` values for `sweep-focus`.
    pub focusing: Vec<f64>,
    /// Walk-off angles for `sweep-walkoff` and `fit-scaling`, degrees.
    pub walkoff_deg: Vec<f64>,
    /// Sideband orders fitted by `fit-scaling`.
    pub orders: Vec<i32>,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            focusing: vec![0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0],
            walkoff_deg: DEFAULT_SCALING_RHO_DEG.to_vec(),
            orders: vec![1, 2, 3],
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AstigmatismSection {
    /// Search range is `[-beta_max, beta_max]`.
    pub beta_max: f64,
    pub tolerance: f64,
    pub objective: Objective,
}

impl Default for AstigmatismSection {
    fn default() -> Self {
        Self {
            beta_max: 10.0,
            tolerance: DEFAULT_BETA_TOLERANCE,
            objective: Objective::OddSidebands,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub crystal: CrystalSection,
    pub pump: PumpSection,
    pub grid: GridSection,
    pub output: OutputSection,
    pub sweep: SweepSection,
    pub astigmatism: AstigmatismSection,
}

/// Wrapper matching any output document that embeds its configuration.
#[derive(Deserialize)]
struct Embedded {
    config: RunConfig,
}

impl RunConfig {
    /// Reads TOML, or JSON when the file ends in `.json`. A JSON output
    /// document is accepted too; its `config` member is used.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let parsed = if value.get("config").is_some() {
                serde_json::from_value::<Embedded>(value).map(|e| e.config)
            } else {
                serde_json::from_value::<RunConfig>(value)
            };
            parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
        }
    }

    /// Output directory: the configured one, else the environment, else a
    /// fixed default.
    pub fn output_dir(&self) -> PathBuf {
        if let Some(d) = &self.output.directory {
            return d.clone();
        }
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => PathBuf::from(FALLBACK_OUTPUT_DIR),
        }
    }

    pub fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }

    /// Resolves the automatic fields and builds the physical configuration.
    /// The returned snapshot has every automatic field replaced by the value
    /// actually used, so feeding it back reproduces the run.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let c = &self.crystal;
        let registry = match &c.registry {
            Some(p) => CrystalRegistry::load(p)?,
            None => CrystalRegistry::builtin()?,
        };
        let model = registry.get(&c.name)?;
        let lambda_p = self.pump.wavelength_nm * 1e-3;
        let theta_deg = match c.theta_deg.value_or(AUTO_THETA, "crystal.theta_deg")? {
            Some(v) => v,
            None => phase_match_angle(&model, lambda_p, c.q0_per_m)?.to_degrees(),
        };
        let crystal = CrystalConfig::new(model.clone(), theta_deg.to_radians(), c.length_mm * 1e-3, c.geometry)?;

        let p = &self.pump;
        let walkoff_deg = match p.walkoff_deg.value_or(AUTO_WALKOFF, "pump.walkoff_deg")? {
            Some(v) => v,
            None => model.walkoff_angle(crystal.theta, lambda_p)?.to_degrees(),
        };
        let pump = PumpConfig {
            lambda_p,
            waist: p.waist_um * 1e-6,
            oam: p.oam,
            walkoff: walkoff_deg.to_radians(),
            walkoff_azimuth: p.walkoff_azimuth_deg.to_radians(),
            astigmatism: p.astigmatism,
            envelope: p.envelope,
        };
        pump.validate()?;

        let l_max = self.grid.l_max;
        let grid = match (self.grid.n_radial, self.grid.n_azimuthal) {
            (Some(n_radial), Some(n_azimuthal)) => GridSpec::Fixed(Resolution { n_radial, n_azimuthal }),
            (None, None) => GridSpec::Auto,
            (r, a) => {
                let auto = Resolution::auto(&crystal, &pump, l_max.max(0) as usize)?;
                GridSpec::Fixed(Resolution {
                    n_radial: r.unwrap_or(auto.n_radial),
                    n_azimuthal: a.unwrap_or(auto.n_azimuthal),
                })
            }
        };

        let mut snapshot = self.clone();
        snapshot.crystal.theta_deg = Setting::Value(theta_deg);
        snapshot.pump.walkoff_deg = Setting::Value(walkoff_deg);
        if let GridSpec::Fixed(r) = grid {
            snapshot.grid.n_radial = Some(r.n_radial);
            snapshot.grid.n_azimuthal = Some(r.n_azimuthal);
        }
        Ok(Resolved {
            crystal,
            pump,
            grid,
            l_max,
            snapshot,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Resolved {
    pub crystal: CrystalConfig,
    pub pump: PumpConfig,
    pub grid: GridSpec,
    pub l_max: i32,
    pub snapshot: RunConfig,
}

impl Resolved {
    /// Pins the grid to one resolution and records it in the snapshot.
    pub fn fix_grid(&mut self) -> Result<Resolution, CliError> {
        let r = self.grid.resolve(&self.crystal, &self.pump, self.l_max)?;
        self.grid = GridSpec::Fixed(r);
        self.snapshot.grid.n_radial = Some(r.n_radial);
        self.snapshot.grid.n_azimuthal = Some(r.n_azimuthal);
        Ok(r)
    }
}
