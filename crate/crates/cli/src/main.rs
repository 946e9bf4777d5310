//! `spdc-oam`: phase matching, OAM spectra, far-field maps, sweeps, scaling
//! fits and astigmatism optimization from a run configuration.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spdc_oam::analysis::Objective;
use spdc_oam::dispersion::Geometry;

use crate::config::{RunConfig, Setting};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "spdc-oam", version, about = "Pump walk-off and OAM conservation in type-I SPDC")]
struct Cli {
    /// Run configuration (TOML, or a JSON snapshot written by an earlier run).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

/// Flags that take precedence over the configuration file.
#[derive(Debug, Default, clap::Args)]
struct Overrides {
    #[arg(long, global = true)]
    crystal: Option<String>,
    /// Cut angle in degrees, or "auto-phase-match".
    #[arg(long, global = true)]
    theta_deg: Option<String>,
    #[arg(long, global = true)]
    length_mm: Option<f64>,
    #[arg(long, global = true, value_parser = parse_geometry)]
    geometry: Option<Geometry>,
    #[arg(long, global = true)]
    wavelength_nm: Option<f64>,
    #[arg(long, global = true)]
    waist_um: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    oam: Option<i32>,
    /// Walk-off in degrees, or "auto-from-dispersion".
    #[arg(long, global = true, allow_hyphen_values = true)]
    walkoff_deg: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    astigmatism: Option<f64>,
    #[arg(long, global = true)]
    n_radial: Option<usize>,
    #[arg(long, global = true)]
    n_azimuthal: Option<usize>,
    #[arg(long, global = true)]
    l_max: Option<i32>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cut angle phase-matching the configured transverse wavenumber.
    PhaseMatch,
    /// Walk-off angle at the configured cut.
    Walkoff,
    /// Joint OAM spectrum.
    Spectrum,
    /// Total-OAM distribution and f_leak.
    TotalOam,
    /// Far-field signal intensity.
    Farfield,
    /// f_leak against sqrt(L / z_R).
    SweepFocus {
        /// Comma-separated focusing values.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
    /// Sideband probabilities against the walk-off angle.
    SweepWalkoff {
        /// Comma-separated walk-off angles in degrees.
        #[arg(long, value_delimiter = ',')]
        values_deg: Option<Vec<f64>>,
    },
    /// Log-log slopes of sideband probabilities against tan(rho).
    FitScaling {
        #[arg(long, value_delimiter = ',')]
        values_deg: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        orders: Option<Vec<i32>>,
    },
    /// Pump astigmatism minimizing walk-off sidebands.
    OptimizeAstig {
        #[arg(long)]
        beta_max: Option<f64>,
        #[arg(long, value_parser = parse_objective)]
        objective: Option<Objective>,
    },
}

fn parse_geometry(s: &str) -> Result<Geometry, String> {
    match s {
        "collinear" => Ok(Geometry::Collinear),
        "non-collinear" => Ok(Geometry::NonCollinear),
        _ => Err(format!("unknown geometry '{s}' (collinear, non-collinear)")),
    }
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    match s {
        "odd-sidebands" => Ok(Objective::OddSidebands),
        "total-leak" => Ok(Objective::TotalLeak),
        _ => Err(format!("unknown objective '{s}' (odd-sidebands, total-leak)")),
    }
}

impl Overrides {
    fn apply(&self, c: &mut RunConfig) {
        if let Some(v) = &self.crystal {
            c.crystal.name = v.clone();
        }
        if let Some(v) = &self.theta_deg {
            c.crystal.theta_deg = Setting::parse(v);
        }
        if let Some(v) = self.length_mm {
            c.crystal.length_mm = v;
        }
        if let Some(v) = self.geometry {
            c.crystal.geometry = v;
        }
        if let Some(v) = self.wavelength_nm {
            c.pump.wavelength_nm = v;
        }
        if let Some(v) = self.waist_um {
            c.pump.waist_um = v;
        }
        if let Some(v) = self.oam {
            c.pump.oam = v;
        }
        if let Some(v) = &self.walkoff_deg {
            c.pump.walkoff_deg = Setting::parse(v);
        }
        if let Some(v) = self.astigmatism {
            c.pump.astigmatism = v;
        }
        if let Some(v) = self.n_radial {
            c.grid.n_radial = Some(v);
        }
        if let Some(v) = self.n_azimuthal {
            c.grid.n_azimuthal = Some(v);
        }
        if let Some(v) = self.l_max {
            c.grid.l_max = v;
        }
        if let Some(v) = &self.output_dir {
            c.output.directory = Some(v.clone());
        }
        if let Some(v) = self.threads {
            c.sweep.threads = v;
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cli.overrides.apply(&mut config);
    match cli.command {
        Command::PhaseMatch => commands::phase_match(&config),
        Command::Walkoff => commands::walkoff(&config),
        Command::Spectrum => commands::spectrum(&config),
        Command::TotalOam => commands::total_oam(&config),
        Command::Farfield => commands::farfield(&config),
        Command::SweepFocus { values } => {
            if let Some(v) = values {
                config.sweep.focusing = v;
            }
            commands::sweep_focus(&config)
        }
        Command::SweepWalkoff { values_deg } => {
            if let Some(v) = values_deg {
                config.sweep.walkoff_deg = v;
            }
            commands::sweep_walkoff(&config)
        }
        Command::FitScaling { values_deg, orders } => {
            if let Some(v) = values_deg {
                config.sweep.walkoff_deg = v;
            }
            if let Some(v) = orders {
                config.sweep.orders = v;
            }
            commands::fit_scaling(&config)
        }
        Command::OptimizeAstig { beta_max, objective } => {
            if let Some(v) = beta_max {
                config.astigmatism.beta_max = v;
            }
            if let Some(v) = objective {
                config.astigmatism.objective = v;
            }
            commands::optimize_astig(&config)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let err = CliError::Config(e.to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
