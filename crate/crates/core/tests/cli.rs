//! End-to-end runs of the `symagm` binary.

use std::path::Path;
use std::process::{Command, Output};

use symagm::linalg::substream;
use symagm::symsum::{random_normalized_family, Side};

fn symagm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symagm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn verify_bounds_passes_with_csv_header() {
    let out = symagm(&[
        "verify-bounds",
        "--n",
        "3,5",
        "--m",
        "2",
        "--d",
        "1,2,3",
        "--families",
        "3",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "family,n,m,d,side,c,lhs,rhs,passed");
    assert_eq!(lines.count(), 2 * 3 * 3);
    assert!(!text.contains("false"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        symagm(&["counterexample", "--t", "2", "--dim", "8", "--seeds", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        symagm(&["deviation", "--trials", "10"]).status.code(),
        Some(2)
    );
    assert_eq!(symagm(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        symagm(&["igm", "--config", "/nonexistent/config.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn json_format_has_columns_and_rows() {
    let out = symagm(&[
        "designs",
        "--orbit",
        "2",
        "--simplex",
        "3",
        "--cross",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["columns"][0], "generator");
    // orbit and projector variants, simplex, cross, icosahedron
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn output_identical_across_worker_counts() {
    let args = [
        "sandwich",
        "--n",
        "4,6",
        "--m",
        "2,3",
        "--d",
        "2,3",
        "--families",
        "4",
        "--seed",
        "9",
    ];
    let one = symagm(&[&args[..], &["--workers", "1"]].concat());
    let four = symagm(&[&args[..], &["--workers", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn replay_reproduces_igm_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    std::fs::copy(config("igm_orbit4.json"), &cfg_path).unwrap();
    let out_path = dir.path().join("curve.csv");
    let manifest = dir.path().join("run.json");
    let first = symagm(&[
        "igm",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
    ]);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let original = std::fs::read(&out_path).unwrap();
    std::fs::remove_file(&cfg_path).unwrap();
    std::fs::remove_file(&out_path).unwrap();

    let again = symagm(&["replay", manifest.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(
        again.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&again.stderr)
    );
    assert_eq!(std::fs::read(&out_path).unwrap(), original);
}

#[test]
fn igm_flat_curve_without_bound() {
    let out = symagm(&["igm", "--config", &config("igm_gamma0.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r[2] == rows[0][2] && r[4].is_empty()));
}

#[test]
fn igm_scalar_matches_closed_form() {
    let out = symagm(&["igm", "--config", &config("igm_scalar.json")]);
    assert_eq!(out.status.code(), Some(0));
    // a = 2, γ = 0.1: factor (1 − 0.4)² per step from η = 4.
    for (k, line) in stdout(&out).lines().skip(1).enumerate() {
        let mse: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        let want = 0.36f64.powi(k as i32) * 4.0;
        assert!(
            (mse - want).abs() <= 1e-12 * want.max(1.0),
            "k {k}: {mse} vs {want}"
        );
    }
}

#[test]
fn family_file_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fam.json");
    random_normalized_family(5, 3, Side::Left, &mut substream(1, 0))
        .unwrap()
        .write_json(&path)
        .unwrap();
    let out = symagm(&[
        "verify-bounds",
        "--family",
        path.to_str().unwrap(),
        "--d",
        "1,2,3,4",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout(&out).lines().count(), 5);
}

#[test]
fn sweep_names_failing_preconditions() {
    let out = symagm(&[
        "sweep",
        "--generator",
        "simplex:2",
        "--gammas",
        "0,1",
        "--k-max",
        "3",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.starts_with("gamma,k,phi,bound,initial_term,noise_term,status"));
    assert!(text.lines().skip(1).any(|l| l.ends_with(",ok")));
    assert!(text.lines().skip(1).any(|l| !l.ends_with(",ok")));
}
