//! End-to-end tests of the binary: real subprocess runs against small
//! configs in a temp directory.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_tdho")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tdho-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let schema = lines.next().unwrap();
    assert!(
        schema.starts_with("# tdho csv v1 "),
        "schema line: {schema}"
    );
    let _header = lines.next().unwrap();
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_constant_omega_matches_cosine() {
    let dir = temp_dir("solve");
    let out = dir.join("solve.csv");
    let status = Command::new(bin())
        .args([
            "solve",
            "--set",
            "profile.kind=constant",
            "--set",
            "profile.omega=2.0",
            "--set",
            "t1=5.0",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = read_rows(&out);
    assert!(rows.len() > 100);
    for row in rows.iter().step_by(37) {
        let t: f64 = row[0].parse().unwrap();
        let q: f64 = row[1].parse().unwrap();
        let q_hat: f64 = row[7].parse().unwrap();
        assert!((q - (2.0 * t).cos()).abs() < 1e-8, "q({t})");
        // constant omega: the hat approximant is exact
        assert!((q_hat - q).abs() < 1e-8);
    }
}

#[test]
fn zeros_constant_omega_table() {
    let dir = temp_dir("zeros");
    let out = dir.join("zeros.csv");
    let status = Command::new(bin())
        .args([
            "zeros",
            "--set",
            "profile.kind=constant",
            "--set",
            "profile.omega=2.0",
            "--set",
            "q0=0",
            "--set",
            "p0=1",
            "--set",
            "t_max=10",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = read_rows(&out);
    assert!(rows.len() >= 12);
    for row in &rows {
        let h: f64 = row[0].parse().unwrap();
        let t: f64 = row[1].parse().unwrap();
        assert!((t - h * std::f64::consts::PI / 4.0).abs() < 1e-9);
    }
    assert_eq!(rows[0][2], "q-zero");
    assert_eq!(rows[1][2], "p-zero");
}

#[test]
fn floquet_map_grid_and_eta_zero_row() {
    let dir = temp_dir("map");
    let out = dir.join("map.csv");
    let status = Command::new(bin())
        .args(["floquet-map", "--resolution", "8", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 64);
    for row in rows.iter().filter(|r| r[1].parse::<f64>().unwrap() == 0.0) {
        let mu: f64 = row[2].parse().unwrap();
        assert!(mu.abs() <= 1.0 + 1e-9, "eta=0 row must not be unstable");
    }
    assert!(out.with_file_name("map_boundary.csv").exists());
}

#[test]
fn rejected_config_gives_single_diagnostic_and_nonzero_exit() {
    let output = Command::new(bin())
        .args([
            "solve",
            "--set",
            "profile.kind=mathieu",
            "--set",
            "profile.omega_bar=1",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr);
    assert_eq!(err.trim().lines().count(), 1, "stderr: {err}");
    assert!(err.contains("error:"));
}

#[test]
fn runs_are_deterministic() {
    let dir = temp_dir("det");
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    for out in [&a, &b] {
        let status = Command::new(bin())
            .args([
                "solve",
                "--set",
                "profile.kind=mathieu",
                "--set",
                "profile.omega_bar=1",
                "--set",
                "profile.eta=0.2",
                "--set",
                "profile.alpha=2",
                "--set",
                "t1=10",
                "--out",
            ])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn adiabatic_json_report() {
    let dir = temp_dir("adia");
    let out = dir.join("report.json");
    let status = Command::new(bin())
        .args([
            "adiabatic",
            "--set",
            "profile.kind=spline-ramp",
            "--set",
            "profile.base=1.0",
            "--set",
            "profile.amplitude=0.3",
            "--set",
            "profile.width=1.6",
            "--set",
            "profile.k=2",
            "--set",
            "epsilons=0.2,0.1,0.05,0.025",
            "--format",
            "json",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let slope = doc["slope"].as_f64().unwrap();
    assert!(slope > 1.7, "slope {slope}");
    assert_eq!(doc["epsilons"].as_array().unwrap().len(), 4);
}
