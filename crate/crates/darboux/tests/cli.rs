//! End-to-end checks of the command-line interface: outputs, exit codes and
//! the config round-trip contract.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_darboux")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("darboux_cli_{}_{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const GREAT_CIRCLE: &str = r#"{
  "surface": {"kind": "sphere", "radius": 1.0},
  "curve": {"n": 256, "closed": true,
            "fourier": {"u": {"constant": 1.5707963267948966}, "v": {"winding": 1}}}
}
"#;

const LATITUDE: &str = r#"{
  "surface": {"kind": "sphere", "radius": 1.0},
  "curve": {"n": 512, "closed": true,
            "fourier": {"u": {"constant": 1.0471975511965976}, "v": {"winding": 1}}}
}
"#;

#[test]
fn analyze_great_circle_summary() {
    let dir = scratch("analyze_gc");
    let config = write_config(&dir, "config.json", GREAT_CIRCLE);
    let output = Command::new(bin())
        .args(["analyze", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let summary = std::fs::read_to_string(dir.join("analysis.json")).unwrap();
    assert!(summary.contains("\"geodesic\": true"), "{summary}");
    assert!(summary.contains("\"principal\": true"), "{summary}");
    assert!(summary.contains("\"asymptotic\": false"), "{summary}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn analyze_latitude_kg_column() {
    let dir = scratch("analyze_lat");
    let config = write_config(&dir, "config.json", LATITUDE);
    let output = Command::new(bin())
        .args(["analyze", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let csv = std::fs::read_to_string(dir.join("scalars.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let kg_col = header.iter().position(|c| *c == "k_g").unwrap();
    let expected = 1.0 / (std::f64::consts::FRAC_PI_3).tan();
    for line in lines {
        let kg: f64 = line.split(',').nth(kg_col).unwrap().parse().unwrap();
        assert!((kg - expected).abs() <= 1e-3, "k_g = {kg}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn analyze_straight_line_scalars_vanish() {
    let dir = scratch("analyze_line");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
  "surface": {"kind": "plane"},
  "curve": {"n": 64, "closed": false, "u_max": 1.0,
            "fourier": {"u": {"slope": 1.0}, "v": {"slope": 0.25}}}
}
"#,
    );
    let output = Command::new(bin())
        .args(["analyze", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    let csv = std::fs::read_to_string(dir.join("scalars.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    for col_name in ["k_g", "k_n", "tau_g", "kappa"] {
        let col = header.iter().position(|c| *c == col_name).unwrap();
        for line in csv.lines().skip(1) {
            let x: f64 = line.split(',').nth(col).unwrap().parse().unwrap();
            assert!(x.abs() <= 1e-10, "{col_name} = {x}");
        }
    }
    let summary = std::fs::read_to_string(dir.join("analysis.json")).unwrap();
    assert!(summary.contains("\"geodesic\": true"));
    assert!(summary.contains("\"asymptotic\": true"));
    assert!(summary.contains("\"principal\": true"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_validation_exit_code_and_message() {
    let dir = scratch("badconfig");
    let config = write_config(
        &dir,
        "bad.json",
        r#"{
  "surface": {"kind": "torus", "ring_radius": 1.0, "tube_radius": 2.0},
  "curve": {"fourier": {"u": {"winding": 1}, "v": {}}}
}
"#,
    );
    let output = Command::new(bin())
        .args(["analyze", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("tube radius exceeds ring radius"), "{stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_error_exit_code() {
    let output = Command::new(bin()).args(["frobnicate"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let output = Command::new(bin()).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_io_error() {
    let dir = scratch("noconfig");
    let output = Command::new(bin())
        .args(["analyze", "--config", "/nonexistent/config.json", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn drift_abort_exit_code() {
    let dir = scratch("drift");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
  "surface": {"kind": "sphere", "radius": 1.0},
  "curve": {"n": 128, "closed": true,
            "fourier": {"u": {"constant": 1.0471975511965976}, "v": {"winding": 1}}},
  "flow": {"f2": "1", "f1_mode": "prescribed", "f1": "0"},
  "simulation": {"dt": 0.001, "steps": 100, "snapshot_stride": 50, "drift_tolerance": 0.001}
}
"#,
    );
    let output = Command::new(bin())
        .args(["simulate", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("drift"), "{stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn closure_incompatible_exit_code() {
    let dir = scratch("closure");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
  "surface": {"kind": "sphere", "radius": 1.0},
  "curve": {"n": 128, "closed": true,
            "fourier": {"u": {"constant": 1.0471975511965976}, "v": {"winding": 1}}},
  "flow": {"f2": "1", "closure_policy": "strict"},
  "simulation": {"steps": 10, "snapshot_stride": 5}
}
"#,
    );
    let output = Command::new(bin())
        .args(["simulate", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn golden_config_reemits_byte_identically() {
    // the checked-in simulate config is already in canonical form: parsing
    // and re-emitting it must reproduce the bytes exactly
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/canonical_config.json");
    let text = std::fs::read_to_string(&golden).unwrap();
    let config = darboux::config::parse_config(&text).unwrap();
    assert_eq!(config.canonical_json(), text, "canonical config drifted");
    // and canonicalization is idempotent from a sparse document
    let sparse = darboux::config::parse_config(GREAT_CIRCLE).unwrap();
    let once = sparse.canonical_json();
    let twice = darboux::config::parse_config(&once).unwrap().canonical_json();
    assert_eq!(once, twice);
}

#[test]
fn render_without_snapshots_is_io_error() {
    let dir = scratch("render_empty");
    let config = write_config(&dir, "config.json", GREAT_CIRCLE);
    let output = Command::new(bin())
        .args(["render", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn rotation_run_renders_equal_lengths() {
    // prescribed rigid-rotation flow: every legend entry shows the same length
    let dir = scratch("rotation_render");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
  "surface": {"kind": "sphere", "radius": 1.0},
  "curve": {"n": 256, "closed": true,
            "fourier": {"u": {"constant": 1.1}, "v": {"winding": 1}}},
  "flow": {"f2": "0", "f1_mode": "prescribed", "f1": "1"},
  "simulation": {"dt": 0.01, "steps": 90, "snapshot_stride": 10, "drift_tolerance": 0.001}
}
"#,
    );
    for sub in ["simulate", "render"] {
        let output = Command::new(bin())
            .args([sub, "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    }
    let svg = std::fs::read_to_string(dir.join("flow.svg")).unwrap();
    let lengths: Vec<f64> = svg
        .match_indices("L=")
        .map(|(i, _)| svg[i + 2..].split('<').next().unwrap().trim().parse().unwrap())
        .collect();
    assert_eq!(lengths.len(), 10);
    for l in &lengths {
        assert!((l - lengths[0]).abs() <= 1e-6, "legend lengths differ: {lengths:?}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn decay_run_renders_monotone_lengths() {
    let dir = scratch("decay_render");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
  "surface": {"kind": "sphere", "radius": 1.0},
  "curve": {"n": 256, "closed": true,
            "fourier": {"u": {"constant": 1.0471975511965976}, "v": {"winding": 1}}},
  "flow": {"f2": "1", "f1_mode": "prescribed", "f1": "0"},
  "simulation": {"dt": 0.001, "steps": 400, "snapshot_stride": 100, "drift_tolerance": 1.0}
}
"#,
    );
    for sub in ["simulate", "render"] {
        let output = Command::new(bin())
            .args([sub, "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    }
    let svg = std::fs::read_to_string(dir.join("flow.svg")).unwrap();
    let lengths: Vec<f64> = svg
        .match_indices("L=")
        .map(|(i, _)| svg[i + 2..].split('<').next().unwrap().trim().parse().unwrap())
        .collect();
    assert!(lengths.len() >= 4);
    for w in lengths.windows(2) {
        assert!(w[1] < w[0], "legend lengths not decaying: {lengths:?}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn prescribed_rigid_rotation_conserves_over_long_run() {
    // tangential unit-speed slide along a great circle is an isometry flow
    let dir = scratch("long_rotation");
    let config = write_config(
        &dir,
        "config.json",
        r#"{
  "surface": {"kind": "sphere", "radius": 1.0},
  "curve": {"n": 512, "closed": true,
            "fourier": {"u": {"constant": 1.5707963267948966}, "v": {"winding": 1}}},
  "flow": {"f2": "0", "f1_mode": "prescribed", "f1": "1"},
  "simulation": {"dt": 0.001, "steps": 1000, "snapshot_stride": 250, "drift_tolerance": 1e-4}
}
"#,
    );
    let output = Command::new(bin())
        .args(["simulate", "--config", config.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let diag = std::fs::read_to_string(dir.join("diagnostics.jsonl")).unwrap();
    let last = diag.lines().last().unwrap();
    let row: serde_json::Value = serde_json::from_str(last).unwrap();
    assert!(row["drift"].as_f64().unwrap() <= 1e-6);
    std::fs::remove_dir_all(&dir).ok();
}
