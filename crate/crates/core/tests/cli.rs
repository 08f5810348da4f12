use std::path::Path;
use std::process::{Command, Output};

use circle_uncertainty::catalog::{von_mises, VonMisesParams};
use circle_uncertainty::cli::CSV_HEADER;
use circle_uncertainty::state::DEFAULT_TAIL_TOL;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circle-uncertainty"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_builtin_von_mises_is_saturated() {
    let out = bin(&["analyze", "--builtin", "von-mises:k=1,l=0,a=0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["source"], "von-mises:k=1,l=0,a=0");
    assert_eq!(v["sat_u2"], true);
    assert_eq!(v["sat_uv"], true);
    assert_eq!(v["sat_ordering_chain"], true);
    let (var_l, u2) = (v["var_l"].as_f64().unwrap(), v["u2"].as_f64().unwrap());
    assert!((var_l - u2).abs() < 1e-11);
}

#[test]
fn analyze_cat_separates_u_and_v() {
    let out = bin(&["analyze", "--builtin", "cat:k=1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sat_uv"], false);
    assert!(v["u2"].as_f64().unwrap() > v["v2"].as_f64().unwrap());
}

#[test]
fn analyze_state_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vm.json");
    let p = VonMisesParams::new(2.0, 1, 1.1).unwrap();
    von_mises(p, DEFAULT_TAIL_TOL).unwrap().to_file().write(&path).unwrap();
    let from_file = json(&bin(&["analyze", "--state", path_str(&path)]));
    let builtin = json(&bin(&["analyze", "--builtin", "von-mises:k=2,l=1,a=1.1"]));
    for key in ["var_l", "var_e", "standard", "v2", "u2", "alpha_star"] {
        assert_eq!(from_file[key], builtin[key], "{key}");
    }
}

#[test]
fn analyze_input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"l_min": 0, "l_max": 0, "coeffs": [[0.5, 0.0]]}"#).unwrap();
    assert_eq!(bin(&["analyze", "--state", path_str(&bad)]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(bin(&["analyze", "--state", path_str(&missing)]).status.code(), Some(2));
    assert_eq!(bin(&["analyze", "--builtin", "von-mises:k=oops"]).status.code(), Some(2));
    assert_eq!(bin(&["analyze"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn analyze_out_of_range_kappa_is_numeric_error() {
    let out = bin(&["analyze", "--builtin", "cat:k=80"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("vm.csv");
    let out = bin(&["sweep", "--family", "von-mises", "--kmin", "0.5", "--kmax", "2", "--n", "4", "--out", path_str(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("von-mises,0.5,"));
    assert!(lines[4].starts_with("von-mises,2.0,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn sweep_rejects_bad_range() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let out = bin(&["sweep", "--family", "cat", "--kmin", "2", "--kmax", "1", "--n", "4", "--out", path_str(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn verify_is_deterministic_and_passes() {
    let a = bin(&["verify", "--corpus", "50", "--seed", "7"]);
    let b = bin(&["verify", "--corpus", "50", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("normalization"));
    assert!(text.trim_end().ends_with("result: PASS"));
}

#[test]
fn verify_flags_denormalized_state() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"l_min": -1, "l_max": 1, "coeffs": [[0.5, 0.0], [0.5, 0.0], [0.5, 0.0]]}"#).unwrap();
    let dump = dir.path().join("repro.json");
    let out = bin(&["verify", "--corpus", "10", "--state", path_str(&bad), "--out", path_str(&dump)]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("normalization           10/11"), "{text}");
    assert!(text.contains("result: FAIL"));
    let repro: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(repro["l_min"], -1);
    assert_eq!(repro["coeffs"].as_array().unwrap().len(), 3);
}
