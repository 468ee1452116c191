use std::path::Path;
use std::process::{Command, Output};

fn levy_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levy-lab")).args(args).output().expect("binary runs")
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let path = dir.join(name);
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--out", &p]);
    let out = levy_lab(&all);
    (out.status.code().unwrap(), std::fs::read_to_string(&path).unwrap_or_default())
}

#[test]
fn stable_trajectory_file() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "trajectory", "--process", "stable", "--alpha", "1.5", "--p", "0.5", "--q", "0.5", "--b", "0", "--delta", "1",
        "--n", "1000", "--seed", "42",
    ];
    let (code, text) = run_to_file(dir.path(), "path.csv", &args);
    assert_eq!(code, 0);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x");
    assert_eq!(lines.len(), 1002);
    assert_eq!(lines[1], "0.0,0.0");
    assert!(lines[1001].starts_with("1000.0,"));
}

#[test]
fn cts_trajectory_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "trajectory", "--process", "cts", "--alpha", "0.5", "--p", "1.7", "--a", "1", "--q", "0.3", "--b-temper", "1",
        "--delta", "0.01", "--n", "1000", "--c", "1", "--seed", "7",
    ];
    let (c1, a) = run_to_file(dir.path(), "a.csv", &args);
    let (c2, b) = run_to_file(dir.path(), "b.csv", &args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a.lines().count(), 1002);
    assert_eq!(a, b);
    let mut other = args.to_vec();
    *other.last_mut().unwrap() = "8";
    let (_, c) = run_to_file(dir.path(), "c.csv", &other);
    assert_ne!(a, c);
}

#[test]
fn cauchy_density_midpoint() {
    let out = levy_lab(&["density", "--dist", "stable", "--alpha", "1", "--beta", "0", "--x-min", "-5", "--x-max", "5", "--points", "101"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,f");
    assert_eq!(lines.len(), 102);
    assert!(lines[51].starts_with("0.0,0.3183098861"), "{}", lines[51]);
}

#[test]
fn json_records_use_csv_keys() {
    let out = levy_lab(&["density", "--dist", "stable", "--alpha", "1", "--x-min", "-1", "--x-max", "1", "--points", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<serde_json::Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1]["x"], 0.0);
    assert!((rows[1]["f"].as_f64().unwrap() - std::f64::consts::FRAC_1_PI).abs() < 1e-14);
}

#[test]
fn convert_round_trip() {
    let out = levy_lab(&["convert", "--alpha", "1.5", "--p", "1", "--q", "0.5", "--b", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let beta = v["beta"].as_f64().unwrap();
    assert!((beta - 1.0 / 3.0).abs() < 1e-15);
    let back = levy_lab(&[
        "convert", "--direction", "stable-to-levy", "--alpha", "1.5",
        "--sigma", &v["sigma"].to_string(), "--beta", &beta.to_string(), "--location", &v["location"].to_string(),
    ]);
    assert_eq!(back.status.code(), Some(0), "{}", String::from_utf8_lossy(&back.stderr));
    let w: serde_json::Value = serde_json::from_slice(&back.stdout).unwrap();
    assert!((w["p"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((w["q"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((w["b"].as_f64().unwrap() - 0.2).abs() < 1e-12);
}

#[test]
fn invalid_flags_exit_2() {
    let out = levy_lab(&["convert", "--alpha", "2.5", "--p", "1", "--q", "1", "--b", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].is_string());
    assert_eq!(levy_lab(&["sample-stable", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(levy_lab(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let out = levy_lab(&["sample-stable", "--alpha", "1.5", "--n", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_emits_json_lines() {
    let out = levy_lab(&["validate", "--n", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 5);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["check"].is_string() && v["pass"].as_bool().unwrap());
    }
}
