use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_spdc-oam");

/// Short crystal, tight pump and a small grid so each run takes well under a second.
const SMALL: &str = r#"
[crystal]
length_mm = 1.0
[pump]
waist_um = 20.0
walkoff_deg = 0.0
[grid]
n_radial = 32
n_azimuthal = 64
l_max = 4
"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("SPDC_OAM_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn small_config(dir: &Path) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, SMALL).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn phase_match_prints_the_reference_cut() {
    let t = TempDir::new().unwrap();
    let o = run(t.path(), &["phase-match", "--output-dir", "out"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("theta = 32.914 deg"), "{}", stdout(&o));
    let v = json(&t.path().join("out/phase_match.json"));
    assert!((v["theta_deg"].as_f64().unwrap() - 32.914).abs() < 0.01);
}

#[test]
fn walkoff_prints_the_dispersion_estimate() {
    let t = TempDir::new().unwrap();
    let o = run(t.path(), &["walkoff", "--output-dir", "out"]);
    assert!(o.status.success());
    let v = json(&t.path().join("out/walkoff.json"));
    let rho = v["rho_deg"].as_f64().unwrap();
    assert!(rho > 3.0 && rho < 5.0);
    assert!(stdout(&o).contains(&format!("rho = {rho:.3} deg")));
}

#[test]
fn spectrum_without_walkoff_conserves_oam() {
    let t = TempDir::new().unwrap();
    let cfg = small_config(t.path());
    let o = run(t.path(), &["spectrum", "-c", &cfg, "--output-dir", "out"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&t.path().join("out/spectrum.json"));
    assert!(v["spectrum"]["f_leak"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["spectrum"]["S"].as_array().unwrap().len(), 81);
    let csv = std::fs::read_to_string(t.path().join("out/spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("l_s,l_i,S"));
    assert_eq!(csv.lines().count(), 82);
}

#[test]
fn flags_override_the_file() {
    let t = TempDir::new().unwrap();
    let cfg = small_config(t.path());
    let o = run(
        t.path(),
        &["total-oam", "-c", &cfg, "--length-mm", "0.5", "--walkoff-deg", "2", "--output-dir", "out"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&t.path().join("out/total_oam.json"));
    assert_eq!(v["config"]["crystal"]["length_mm"].as_f64(), Some(0.5));
    assert_eq!(v["config"]["pump"]["walkoff_deg"].as_f64(), Some(2.0));
    // untouched file values survive
    assert_eq!(v["config"]["pump"]["waist_um"].as_f64(), Some(20.0));
    assert!(v["f_leak"].as_f64().unwrap() > 1e-8);
}

#[test]
fn output_directory_precedence() {
    let t = TempDir::new().unwrap();
    let cfg = small_config(t.path());
    let env_dir = t.path().join("from-env");
    let o = Command::new(BIN)
        .args(["phase-match", "-c", &cfg])
        .current_dir(t.path())
        .env("SPDC_OAM_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env_dir.join("phase_match.json").exists());

    std::fs::write(
        t.path().join("with_dir.toml"),
        format!("{SMALL}\n[output]\ndirectory = \"from-file\"\n"),
    )
    .unwrap();
    let o = Command::new(BIN)
        .args(["phase-match", "-c", "with_dir.toml"])
        .current_dir(t.path())
        .env("SPDC_OAM_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(t.path().join("from-file/phase_match.json").exists());
}

#[test]
fn snapshot_reproduces_the_run() {
    let t = TempDir::new().unwrap();
    let cfg = small_config(t.path());
    let first = run(t.path(), &["spectrum", "-c", &cfg, "--walkoff-deg", "3", "--output-dir", "a"]);
    assert!(first.status.success());
    let snap = t.path().join("a/spectrum.json");
    let second = run(
        t.path(),
        &["spectrum", "-c", snap.to_str().unwrap(), "--output-dir", "b"],
    );
    assert!(second.status.success(), "{}", String::from_utf8_lossy(&second.stderr));
    let a = std::fs::read(t.path().join("a/spectrum.csv")).unwrap();
    let b = std::fs::read(t.path().join("b/spectrum.csv")).unwrap();
    assert_eq!(a, b);
    let ja = json(&t.path().join("a/spectrum.json"));
    let jb = json(&t.path().join("b/spectrum.json"));
    assert_eq!(ja["spectrum"], jb["spectrum"]);
    assert_eq!(ja["config"]["pump"], jb["config"]["pump"]);
}

#[test]
fn automatic_fields_are_echoed_resolved() {
    let t = TempDir::new().unwrap();
    let o = run(t.path(), &["walkoff", "--theta-deg", "auto-phase-match", "--output-dir", "out"]);
    assert!(o.status.success());
    let v = json(&t.path().join("out/walkoff.json"));
    assert!(v["config"]["crystal"]["theta_deg"].is_f64());
    assert!(v["config"]["pump"]["walkoff_deg"].is_f64());
}

#[test]
fn sweep_csv_is_deterministic_across_pool_widths() {
    let t = TempDir::new().unwrap();
    let cfg = small_config(t.path());
    let args = |dir: &'static str, threads: &'static str| {
        vec!["sweep-walkoff", "--values-deg", "0,1,3", "--threads", threads, "--output-dir", dir]
    };
    for (dir, threads) in [("one", "1"), ("two", "2"), ("again", "1")] {
        let mut a = args(dir, threads);
        a.extend(["-c", &cfg]);
        let o = run(t.path(), &a);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let one = std::fs::read(t.path().join("one/sweep_walkoff.csv")).unwrap();
    assert_eq!(one, std::fs::read(t.path().join("two/sweep_walkoff.csv")).unwrap());
    assert_eq!(one, std::fs::read(t.path().join("again/sweep_walkoff.csv")).unwrap());
    let text = String::from_utf8(one).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("rho_rad,f_leak,P(-3),P(-2),P(-1),P(0),P(1),P(2),P(3)")
    );
    assert!(t.path().join("one/sweep_walkoff.json").exists());
}

#[test]
fn config_errors_exit_2() {
    let t = TempDir::new().unwrap();
    std::fs::write(t.path().join("bad.toml"), "[pump]\nwaist = 3\n").unwrap();
    let o = run(t.path(), &["spectrum", "-c", "bad.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "config");
    assert_eq!(err["exit_code"], 2);

    let o = run(t.path(), &["spectrum", "--theta-deg", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(t.path(), &["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn physics_errors_exit_3() {
    let t = TempDir::new().unwrap();
    // outside the Sellmeier validity range
    let o = run(t.path(), &["phase-match", "--wavelength-nm", "150", "--output-dir", "out"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["exit_code"], 3);
}

#[test]
fn failed_fits_exit_4() {
    let t = TempDir::new().unwrap();
    let cfg = small_config(t.path());
    let o = run(
        t.path(),
        &["fit-scaling", "-c", &cfg, "--values-deg", "1,2,3", "--orders", "1", "--output-dir", "out"],
    );
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "fit");
}

#[test]
fn farfield_outputs() {
    let t = TempDir::new().unwrap();
    let cfg = small_config(t.path());
    let o = run(t.path(), &["farfield", "-c", &cfg, "--output-dir", "out"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&t.path().join("out/farfield.json"));
    assert_eq!(v["farfield"]["normalization"], "peak");
    let csv = std::fs::read_to_string(t.path().join("out/farfield.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("q_s,phi_s,intensity"));
    assert_eq!(csv.lines().count(), 1 + 32 * 64);
}
