//! End-to-end behaviour of the sqz binary.

use std::io::Write as _;
use std::process::{Command, Output};

const REFERENCE: &str = r#"{
  "physical": {
    "pump_waist_m": 1.0e-3,
    "lo_waist_m": 1.0e-4,
    "pump_bandwidth_rad_s": 1.0e11,
    "lo_bandwidth_rad_s": 1.0e12,
    "pump_wavelength_m": 4.0e-7,
    "crystal_length_m": 1.0e-3,
    "pump_amplitude": 2.5e6,
    "nonlinear_cross_section_m2": 1.2e-23,
    "index_pump": 1.6,
    "index_degenerate": 1.6
  }
}"#;

fn sqz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqz"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn reduce_prints_reduced_parameters() {
    let cfg = write_config(REFERENCE);
    let out = sqz(&["reduce", "--config", cfg.path().to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("xi      = 1.0000000000000002e-2"));
    assert!(stdout.contains("tau     = 1.0000000000000002e-2"));
    assert!(stdout.contains("Xi      ="));
    assert!(stdout.contains("delta_p ="));
    assert!(stdout.contains("margin  ="));
    // no advisory for the reference config
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(!stderr.contains("thin-crystal"));
}

#[test]
fn reduce_rejects_invalid_config_naming_field() {
    let bad = REFERENCE.replace("\"lo_waist_m\": 1.0e-4", "\"lo_waist_m\": 0.0");
    let cfg = write_config(&bad);
    let out = sqz(&["reduce", "--config", cfg.path().to_str().unwrap()]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("lo_waist"), "stderr: {stderr}");
}

#[test]
fn reduce_warns_when_thin_crystal_assumption_weak() {
    // crystal half the Rayleigh criterion: margin = 0.5
    let weak = REFERENCE.replace(
        "\"crystal_length_m\": 1.0e-3",
        "\"crystal_length_m\": 1.3e0",
    );
    let cfg = write_config(&weak);
    let out = sqz(&["reduce", "--config", cfg.path().to_str().unwrap()]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("thin-crystal assumption weak"),
        "stderr: {stderr}"
    );
}

#[test]
fn sweep_emits_contracted_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let out = sqz(&[
        "sweep",
        "--axis",
        "Xi",
        "--min",
        "0",
        "--max",
        "5",
        "--points",
        "6",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("axis,value,sigma_minus_sq,sigma_plus_sq,area,terms_used,est_rel_err"));
    let rows = sqz_cli::sweep::parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 6);
    // the Xi = 0 row is the vacuum
    assert_eq!(rows[0].1.sigma_minus_sq, 0.5);
    assert_eq!(rows[0].1.sigma_plus_sq, 0.5);
    assert_eq!(rows[0].1.area, 0.5);
}

#[test]
fn sweep_tau_axis_area_peaks_in_paper_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("tau.csv");
    let out = sqz(&[
        "sweep",
        "--axis",
        "tau",
        "--min",
        "0.5",
        "--max",
        "20",
        "--points",
        "40",
        "--fix",
        "Xi=3",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = sqz_cli::sweep::parse_csv(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let (best_tau, _) = rows
        .iter()
        .map(|(v, d)| (*v, d.area))
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    assert!((3.0..=10.0).contains(&best_tau), "peak at tau = {best_tau}");
}

#[test]
fn sweep_ell_axis_minimum_variance_nondecreasing() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("ell.csv");
    let out = sqz(&[
        "sweep",
        "--axis",
        "ell",
        "--min",
        "0",
        "--max",
        "5",
        "--points",
        "6",
        "--fix",
        "tau=1",
        "--fix",
        "Xi=5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rows = sqz_cli::sweep::parse_csv(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let mins: Vec<f64> = rows.iter().map(|(_, d)| d.sigma_minus_sq).collect();
    assert!(mins.windows(2).all(|w| w[1] >= w[0]), "{mins:?}");
}

#[test]
fn figures_single_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = sqz(&[
        "figures",
        "--which",
        "3",
        "--outdir",
        dir.path().to_str().unwrap(),
        "--points",
        "15",
    ]);
    assert!(out.status.success());
    assert!(dir.path().join("f3.csv").exists());
    let svg = std::fs::read_to_string(dir.path().join("f3.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(
        sqz(&["figures", "--which", "9", "--outdir", "/tmp"])
            .status
            .code()
            .unwrap()
            != 0
    );
}

#[test]
fn verify_hypergeom_suite_exits_zero() {
    let out = sqz(&["verify", "--suite", "hypergeom"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("[PASS]"));
    assert!(stdout.contains("checks passed"));
    assert!(sqz(&["verify", "--suite", "bogus"]).status.code().unwrap() != 0);
}

#[test]
fn precision_digits_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("s.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_sqz"))
        .env("SQZ_PRECISION_DIGITS", "30")
        .args([
            "sweep",
            "--axis",
            "Xi",
            "--min",
            "0",
            "--max",
            "2",
            "--points",
            "3",
            "--out",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("precision_digits=30"));
    // a malformed override is rejected where a policy is constructed
    let out = Command::new(env!("CARGO_BIN_EXE_sqz"))
        .env("SQZ_PRECISION_DIGITS", "many")
        .args([
            "sweep",
            "--axis",
            "Xi",
            "--min",
            "0",
            "--max",
            "2",
            "--points",
            "3",
            "--out",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("SQZ_PRECISION_DIGITS"), "stderr: {stderr}");
}
