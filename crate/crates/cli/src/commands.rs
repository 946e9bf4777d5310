use std::path::Path;

use serde::Serialize;
use spdc_oam::analysis::{
    self, fit_scaling_law, optimize_astigmatism, spectrum as run_spectrum, sweep_focusing, AstigmatismResult, ScalingFit, SweepOptions, SweepResult,
};
use spdc_oam::biphoton::{PolarGrid, Resolution};
use spdc_oam::farfield::signal_intensity;
use spdc_oam::io::{
    farfield_csv, spectrum_csv, sweep_csv, total_oam_csv, FarfieldDocument, SpectrumDocument, SCHEMA_VERSION,
};

use crate::config::{Format, Resolved, RunConfig};
use crate::error::CliError;

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Writes `<stem>.json` (always) and `<stem>.csv` (when requested and given).
fn emit<T: Serialize>(
    r: &Resolved,
    command: &str,
    stem: &str,
    body: T,
    csv: Option<String>,
) -> Result<(), CliError> {
    let dir = r.snapshot.output_dir();
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        command,
        config: &r.snapshot,
        body,
    };
    if r.snapshot.wants(Format::Json) {
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))?;
        write(&dir, &format!("{stem}.json"), &text)?;
    }
    if let (true, Some(csv)) = (r.snapshot.wants(Format::Csv), csv) {
        write(&dir, &format!("{stem}.csv"), &csv)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PhaseMatchBody {
    theta_deg: f64,
    theta_rad: f64,
    lambda_p_um: f64,
    q0_per_m: f64,
}

pub fn phase_match(config: &RunConfig) -> Result<String, CliError> {
    let mut c = config.clone();
    c.crystal.theta_deg = crate::config::Setting::Keyword(crate::config::AUTO_THETA.into());
    let r = c.resolve()?;
    let theta = r.crystal.theta;
    emit(
        &r,
        "phase-match",
        "phase_match",
        PhaseMatchBody {
            theta_deg: theta.to_degrees(),
            theta_rad: theta,
            lambda_p_um: r.pump.lambda_p,
            q0_per_m: c.crystal.q0_per_m,
        },
        None,
    )?;
    Ok(format!("theta = {:.3} deg ({:.6} deg)", theta.to_degrees(), theta.to_degrees()))
}

#[derive(Serialize)]
struct WalkoffBody {
    theta_deg: f64,
    rho_deg: f64,
    rho_rad: f64,
    n_e_theta: f64,
}

pub fn walkoff(config: &RunConfig) -> Result<String, CliError> {
    let mut c = config.clone();
    c.pump.walkoff_deg = crate::config::Setting::Keyword(crate::config::AUTO_WALKOFF.into());
    let r = c.resolve()?;
    let m = &r.crystal.sellmeier;
    let n_e = m.index_e_at_angle(r.crystal.theta, r.pump.lambda_p)?;
    emit(
        &r,
        "walkoff",
        "walkoff",
        WalkoffBody {
            theta_deg: r.crystal.theta.to_degrees(),
            rho_deg: r.pump.walkoff.to_degrees(),
            rho_rad: r.pump.walkoff,
            n_e_theta: n_e,
        },
        None,
    )?;
    Ok(format!(
        "rho = {:.3} deg at theta = {:.3} deg",
        r.pump.walkoff.to_degrees(),
        r.crystal.theta.to_degrees()
    ))
}

#[derive(Serialize)]
struct SpectrumBody {
    resolution: Resolution,
    spectrum: SpectrumDocument,
}

pub fn spectrum(config: &RunConfig) -> Result<String, CliError> {
    let mut r = config.resolve()?;
    let resolution = r.fix_grid()?;
    let s = run_spectrum(&r.crystal, &r.pump, r.grid, r.l_max)?;
    let doc = SpectrumDocument::new(&s);
    let summary = format!(
        "theta = {:.3} deg, rho = {:.3} deg, f_leak = {:.6e}, truncation = {:.3e}",
        r.crystal.theta.to_degrees(),
        r.pump.walkoff.to_degrees(),
        doc.f_leak,
        doc.truncation_mass
    );
    emit(&r, "spectrum", "spectrum", SpectrumBody { resolution, spectrum: doc }, Some(spectrum_csv(&s)))?;
    Ok(summary)
}

#[derive(Serialize)]
struct TotalOamBody {
    resolution: Resolution,
    f_leak: f64,
    nyquist_mass: f64,
    total_oam: std::collections::BTreeMap<i32, f64>,
}

pub fn total_oam(config: &RunConfig) -> Result<String, CliError> {
    let mut r = config.resolve()?;
    let resolution = r.fix_grid()?;
    let s = run_spectrum(&r.crystal, &r.pump, r.grid, r.l_max)?;
    let doc = SpectrumDocument::new(&s);
    let csv = total_oam_csv(&doc.total_oam);
    let p = |n: i32| s.total_oam_probability(s.l_tot_pump + n);
    let summary = format!(
        "f_leak = {:.6e}, P(+-1) = {:.3e} / {:.3e}, P(+-2) = {:.3e} / {:.3e}",
        doc.f_leak,
        p(1),
        p(-1),
        p(2),
        p(-2)
    );
    let body = TotalOamBody {
        resolution,
        f_leak: doc.f_leak,
        nyquist_mass: doc.nyquist_mass,
        total_oam: doc.total_oam,
    };
    emit(&r, "total-oam", "total_oam", body, Some(csv))?;
    Ok(summary)
}

#[derive(Serialize)]
struct FarfieldBody {
    resolution: Resolution,
    farfield: FarfieldDocument,
}

pub fn farfield(config: &RunConfig) -> Result<String, CliError> {
    let mut r = config.resolve()?;
    let resolution = r.fix_grid()?;
    let grid = PolarGrid::for_configuration(&r.crystal, &r.pump, resolution)?;
    let map = signal_intensity(&r.crystal, &r.pump, &grid)?;
    let doc = FarfieldDocument::new(&map, grid.q_min, grid.q_max);
    let summary = format!(
        "peak at q = {:.4e} 1/m, centroid = ({:.4e}, {:.4e}) / w_p",
        doc.peak_q, doc.centroid_x, doc.centroid_y
    );
    emit(&r, "farfield", "farfield", FarfieldBody { resolution, farfield: doc }, Some(farfield_csv(&map)))?;
    Ok(summary)
}

fn sweep_options(r: &Resolved) -> SweepOptions {
    SweepOptions {
        grid: r.grid,
        l_max: r.l_max,
        threads: r.snapshot.sweep.threads,
    }
}

#[derive(Serialize)]
struct SweepBody<'a> {
    sweep: &'a SweepResult,
}

fn sweep_summary(s: &SweepResult) -> String {
    let pairs: Vec<String> = s
        .values
        .iter()
        .zip(&s.f_leak)
        .map(|(v, f)| format!("{v:.4}:{f:.3e}"))
        .collect();
    format!("{} points, f_leak = [{}]", s.values.len(), pairs.join(", "))
}

pub fn sweep_focus(config: &RunConfig) -> Result<String, CliError> {
    let r = config.resolve()?;
    let s = sweep_focusing(&r.crystal, &r.pump, &r.snapshot.sweep.focusing, &sweep_options(&r))?;
    emit(&r, "sweep-focus", "sweep_focus", SweepBody { sweep: &s }, Some(sweep_csv(&s)))?;
    Ok(sweep_summary(&s))
}

fn walkoff_values(r: &Resolved) -> Vec<f64> {
    r.snapshot.sweep.walkoff_deg.iter().map(|d| d.to_radians()).collect()
}

pub fn sweep_walkoff(config: &RunConfig) -> Result<String, CliError> {
    let r = config.resolve()?;
    let s = analysis::sweep_walkoff(&r.crystal, &r.pump, &walkoff_values(&r), &sweep_options(&r))?;
    emit(&r, "sweep-walkoff", "sweep_walkoff", SweepBody { sweep: &s }, Some(sweep_csv(&s)))?;
    Ok(sweep_summary(&s))
}

#[derive(Serialize)]
struct FitBody<'a> {
    sweep: &'a SweepResult,
    fits: &'a [ScalingFit],
}

pub fn fit_scaling(config: &RunConfig) -> Result<String, CliError> {
    let r = config.resolve()?;
    let s = analysis::sweep_walkoff(&r.crystal, &r.pump, &walkoff_values(&r), &sweep_options(&r))?;
    let fits = r
        .snapshot
        .sweep
        .orders
        .iter()
        .map(|&n| fit_scaling_law(&s, n))
        .collect::<Result<Vec<_>, _>>()?;
    emit(&r, "fit-scaling", "fit_scaling", FitBody { sweep: &s, fits: &fits }, Some(sweep_csv(&s)))?;
    let parts: Vec<String> = fits
        .iter()
        .map(|f| format!("P({}) slope {:.3} +- {:.3} (expect {})", f.order, f.slope, f.slope_stderr, f.expected_slope()))
        .collect();
    Ok(parts.join("; "))
}

#[derive(Serialize)]
struct AstigBody<'a> {
    resolution: Resolution,
    result: &'a AstigmatismResult,
}

pub fn optimize_astig(config: &RunConfig) -> Result<String, CliError> {
    let mut r = config.resolve()?;
    let resolution = r.fix_grid()?;
    let a = &r.snapshot.astigmatism;
    let res = optimize_astigmatism(
        &r.crystal,
        &r.pump,
        (-a.beta_max, a.beta_max),
        a.objective,
        r.grid,
        a.tolerance,
    )?;
    emit(&r, "optimize-astig", "optimize_astig", AstigBody { resolution, result: &res }, None)?;
    let mut summary = format!(
        "beta = {:.4}, objective {:.4e} -> {:.4e}, P(1) {:.3e} -> {:.3e}, P(2) {:.3e} -> {:.3e}",
        res.beta,
        res.objective_at_zero,
        res.objective_at_beta,
        res.before[4],
        res.after[4],
        res.before[5],
        res.after[5]
    );
    if res.boundary {
        summary.push_str(" (warning: minimum on the search boundary)");
    }
    Ok(summary)
}
