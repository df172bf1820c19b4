//! End-to-end checks of the binary: flag validation, exit codes, and output
//! formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn zeig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeig"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_reports_known_pair_and_classification() {
    let ex1 = fixtures().join("ex1.tns");
    let out = zeig(&[
        "solve",
        "--tensor",
        ex1.to_str().unwrap(),
        "--method",
        "es",
        "--alpha",
        "1",
        "--gamma",
        "opt",
        "--start",
        "-0.402911,0.903051,-0.148865",
        "--format",
        "json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let json_start = text.find('{').unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text[json_start..]).unwrap();
    assert_eq!(doc["status"], "Converged");
    assert!((doc["lambda"].as_f64().unwrap() - 0.8730).abs() < 5e-5);
    assert_eq!(doc["classification"], "NegativeStable");
    assert!(doc["resolved_gamma"].as_f64().unwrap() < 0.0);
}

#[test]
fn insufficient_shift_exits_two() {
    let ex2 = fixtures().join("ex2.tns");
    let out = zeig(&[
        "solve",
        "--tensor",
        ex2.to_str().unwrap(),
        "--method",
        "sshopm",
        "--alpha",
        "0",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("MaxIters"));
}

#[test]
fn invalid_flag_combinations_exit_one() {
    let ex1 = fixtures().join("ex1.tns");
    let ex1 = ex1.to_str().unwrap();
    // gamma is rejected for plain methods
    let out = zeig(&[
        "solve", "--tensor", ex1, "--method", "sshopm", "--alpha", "1", "--gamma", "-0.3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // tau is rejected for static-shift methods
    let out = zeig(&[
        "solve", "--tensor", ex1, "--method", "es", "--alpha", "1", "--gamma", "-0.3", "--tau",
        "1e-6",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // alpha is rejected for adaptive methods
    let out = zeig(&["solve", "--tensor", ex1, "--method", "geap", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(1));
    // unreadable tensor
    let out = zeig(&[
        "solve",
        "--tensor",
        "/nonexistent.tns",
        "--method",
        "sshopm",
        "--alpha",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn trials_table_lists_expected_spectrum() {
    let ex2 = fixtures().join("ex2.tns");
    let out = zeig(&[
        "trials",
        "--tensor",
        ex2.to_str().unwrap(),
        "--all-methods",
        "--alpha",
        "2",
        "--gamma",
        "-0.35",
        "--tau",
        "1e-6",
        "--trials",
        "60",
        "--seed",
        "42",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for needle in ["0.8893", "0.8169", "0.3633", "S-SHOPM", "DE-GEAP", "# Occ."] {
        assert!(text.contains(needle), "missing {needle} in:\n{text}");
    }
}

#[test]
fn identical_seeds_reproduce_output_bytes() {
    let ex1 = fixtures().join("ex1.tns");
    let args = [
        "trials",
        "--tensor",
        ex1.to_str().unwrap(),
        "--method",
        "degeap",
        "--trials",
        "25",
        "--seed",
        "11",
        "--format",
        "json",
    ];
    let a = zeig(&args);
    let b = zeig(&args);
    assert_eq!(out_bytes(&a), out_bytes(&b));
}

fn out_bytes(o: &Output) -> &[u8] {
    &o.stdout
}

#[test]
fn graph2tensor_round_trips_through_solve() {
    let dir = std::env::temp_dir().join(format!("zeig-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let tns = dir.join("k3.tns");
    let out = zeig(&[
        "graph2tensor",
        "--graph",
        fixtures().join("k3.coord").to_str().unwrap(),
        "--out",
        tns.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("1 triangles"));

    let out = zeig(&[
        "solve",
        "--tensor",
        tns.to_str().unwrap(),
        "--method",
        "sshopm",
        "--alpha",
        "2",
        "--seed",
        "1",
        "--format",
        "json",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let json_start = text.find('{').unwrap();
    let end = text.rfind('}').unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text[json_start..=end]).unwrap();
    assert!((doc["lambda"].as_f64().unwrap() - 2.0 / 3.0f64.sqrt()).abs() < 1e-9);
    // trace CSV and sidecar landed in the out dir
    assert!(dir.join("solve-sshopm-k3.csv").exists());
    assert!(dir.join("solve-sshopm-k3.json").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn rate_rejects_out_of_range_gamma_grid() {
    let ex1 = fixtures().join("ex1.tns");
    let out = zeig(&[
        "rate",
        "--tensor",
        ex1.to_str().unwrap(),
        "--alpha",
        "1",
        "--start",
        "-0.402911,0.903051,-0.148865",
        "--gammas",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rate_auto_grid_prints_predictions() {
    let ex1 = fixtures().join("ex1.tns");
    let out = zeig(&[
        "rate",
        "--tensor",
        ex1.to_str().unwrap(),
        "--alpha",
        "1",
        "--start",
        "-0.402911,0.903051,-0.148865",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("gamma_opt"));
    assert!(text.contains("monotone"));
}
