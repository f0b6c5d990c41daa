use std::path::Path;
use sha2::Digest;
use std::process::{Command, Output};

use serde_json::Value;

const OPTIMUM: &str = "0.0296,0.01,0.01,0.01,0.01,0.01,0.0226,0.06";

fn flywheel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flywheel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn evaluate_constant_thickness() {
    let o = flywheel(&["evaluate", "--x", "0.02,0.02,0.02,0.02,0.02,0.02,0.02,0.02", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert!((v["mass_kg"].as_f64().unwrap() - 112.24).abs() < 0.01);
    assert!((v["kinetic_energy_j"].as_f64().unwrap() - 30483.66).abs() < 0.5);
    assert!((v["max_von_mises_n_mm2"].as_f64().unwrap() - 6.43).abs() < 0.02);
    assert_eq!(v["feasible"], Value::Bool(false));
}

#[test]
fn evaluate_published_optimum_text() {
    let o = flywheel(&["evaluate", "--x", OPTIMUM]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("kinetic energy       40854.76 J"), "{text}");
    assert!(text.contains("mass constraint      ok"));
}

#[test]
fn wrong_arity_is_a_usage_error() {
    let o = flywheel(&["evaluate", "--x", "0.02,0.02"]);
    assert_eq!(o.status.code(), Some(2));
    let o = flywheel(&["evaluate", "--x", ""]);
    assert_eq!(o.status.code(), Some(2));
    let o = flywheel(&["evaluate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_of_bounds_design_warns_but_evaluates() {
    let o = flywheel(&["evaluate", "--x", "0.005,0.02,0.02,0.02,0.02,0.02,0.02,0.02"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: t_1"));
}

#[test]
fn config_errors_have_their_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\n  \"material\": {\n    \"density_kg_m3\": ,\n  }\n}\n");
    let o = flywheel(&["evaluate", "--config", &bad, "--x", OPTIMUM]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let unknown = write(dir.path(), "unknown.json", r#"{"design": {"radius": 1}}"#);
    let o = flywheel(&["evaluate", "--config", &unknown, "--x", OPTIMUM]);
    assert_eq!(o.status.code(), Some(3));

    let o = flywheel(&["evaluate", "--config", "/nonexistent/flywheel.json", "--x", OPTIMUM]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn numerical_failures_have_their_own_exit_code() {
    let o = flywheel(&["evaluate", "--x", "0.02,0.02,0.02,-0.5,0.02,0.02,0.02,0.02"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn analyze_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("s.svg");
    let o = flywheel(&[
        "analyze",
        "--x",
        "0.02,0.02,0.02,0.02,0.02,0.02,0.02,0.02",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "u,r_m,t_m,Z_N,sigma_r_Pa,sigma_theta_Pa,sigma_vm_Pa,sigma_vm_N_mm2"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 501);
    assert_eq!(rows[0][4], 0.0);
    assert_eq!(rows[500][4], 0.0);
    assert!((rows[0][1] - 0.06).abs() < 1e-12 && (rows[500][1] - 0.5).abs() < 1e-12);
    assert!(rows.windows(2).all(|w| w[1][5] < w[0][5]), "sigma_theta decreases outward");
    assert!(std::fs::read_to_string(svg).unwrap().contains("<polyline"));
}

#[test]
fn optimize_writes_artifacts_that_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "small.json",
        r#"{"optimizer": {"population_size": 60, "max_iterations": 40, "restarts": 1,
            "upper_bound_m": [0.04, 0.015, 0.015, 0.015, 0.015, 0.015, 0.03, 0.06]}}"#,
    );
    let out = dir.path().join("run");
    let o = Command::new(env!("CARGO_BIN_EXE_flywheel"))
        .args(["optimize", "--config", &config, "--seed", "9", "--out", out.to_str().unwrap()])
        .env("FLYWHEEL_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    for name in manifest["outputs"].as_array().unwrap() {
        assert!(out.join(name.as_str().unwrap()).exists());
    }
    assert_eq!(manifest["seed"], 9);
    let bytes = std::fs::read(&config).unwrap();
    let digest = format!("sha256:{:x}", sha2::Sha256::digest(&bytes));
    assert_eq!(manifest["config_digest"].as_str().unwrap(), digest);

    let history: Vec<f64> = std::fs::read_to_string(out.join("convergence.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(history.windows(2).all(|w| w[1] <= w[0]));

    let profile = std::fs::read_to_string(out.join("profile.csv")).unwrap();
    let first: Vec<f64> = profile.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let last: Vec<f64> = profile.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((first[1] - 0.06).abs() < 1e-12 && (last[1] - 0.5).abs() < 1e-12);
    assert_eq!(first[3], -first[2]);

    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let x: Vec<String> = summary["design"]["x"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.to_string())
        .collect();
    let again = flywheel(&["evaluate", "--config", &config, "--x", &x.join(","), "--json"]);
    assert!(again.status.success());
    assert_eq!(json(&again), summary["design"]);
}

#[test]
fn bad_thread_setting_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_flywheel"))
        .args(["optimize", "--out", dir.path().to_str().unwrap()])
        .env("FLYWHEEL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
