//! End-to-end tests of the binary: file formats, reports, exit codes, and
//! byte stability.

use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polystab"))
}

fn write_file(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

const RECTANGLE_JSON: &str = r#"{"vertices": [[0,0],[2,0],[2,1],[0,1]], "name": "rectangle"}"#;
const DART_JSON: &str = r#"{"vertices": [[0,0],[4,0],[2,1],[2,3]]}"#;
const BOWTIE_JSON: &str = r#"{"vertices": [[0,0],[1,1],[1,0],[0,1]]}"#;

#[test]
fn analyze_rectangle_report() {
    let dir = TempDir::new().unwrap();
    let path = write_file(&dir, "rectangle.json", RECTANGLE_JSON);
    let output = bin().arg("analyze").arg(&path).output().unwrap();
    assert!(output.status.success(), "{output:?}");
    let report = stdout_json(&output);
    let metrics = &report["metrics"];
    assert!((metrics["delta"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert!((metrics["sigma_s2"].as_f64().unwrap() - 0.25).abs() < 1e-13);
    assert!(metrics["sigma_r2"].as_f64().unwrap().abs() < 1e-13);
    assert_eq!(report["tau"].as_f64().unwrap(), 0.0);
    assert_eq!(report["alpha_c"].as_f64().unwrap(), 0.0);
    assert_eq!(report["inequality_check"]["satisfied"], true);
    assert_eq!(report["provenance"]["name"], "rectangle");
}

#[test]
fn analyze_regular_hexagon_has_zero_deficit() {
    let dir = TempDir::new().unwrap();
    let vertices: Vec<String> = (0..6)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 6.0;
            format!("[{:.17}, {:.17}]", t.cos(), t.sin())
        })
        .collect();
    let path = write_file(
        &dir,
        "hexagon.json",
        &format!("{{\"vertices\": [{}]}}", vertices.join(",")),
    );
    let output = bin().arg("analyze").arg(&path).output().unwrap();
    assert!(output.status.success(), "{output:?}");
    let report = stdout_json(&output);
    assert!(report["metrics"]["delta"].as_f64().unwrap().abs() < 1e-12);
    assert!(report["metrics"]["sigma_s2"].as_f64().unwrap().abs() < 1e-12);
    assert!(report["metrics"]["sigma_r2"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(report["tau"].as_f64().unwrap(), 0.0);
}

#[test]
fn analyze_bowtie_with_tau_exits_one() {
    let dir = TempDir::new().unwrap();
    let path = write_file(&dir, "bowtie.json", BOWTIE_JSON);
    let output = bin().arg("analyze").arg(&path).arg("--tau").output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("simple"), "stderr: {stderr}");
}

#[test]
fn analyze_reads_csv() {
    let dir = TempDir::new().unwrap();
    let path = write_file(&dir, "rectangle.csv", "x,y\n0,0\n2,0\n2,1\n0,1\n");
    let output = bin().arg("analyze").arg(&path).output().unwrap();
    assert!(output.status.success(), "{output:?}");
    let report = stdout_json(&output);
    assert!((report["metrics"]["delta"].as_f64().unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn analyze_output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let path = write_file(&dir, "dart.json", DART_JSON);
    let run = || bin().arg("analyze").arg(&path).output().unwrap();
    let first = run();
    let second = run();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn analyze_rejects_bad_eps_env() {
    let dir = TempDir::new().unwrap();
    let path = write_file(&dir, "rectangle.json", RECTANGLE_JSON);
    let output = bin()
        .arg("analyze")
        .arg(&path)
        .env("POLYSTAB_EPS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn convexify_dart_writes_trace() {
    let dir = TempDir::new().unwrap();
    let path = write_file(&dir, "dart.json", DART_JSON);
    let trace_path = dir.path().join("trace.json");
    let output = bin()
        .arg("convexify")
        .arg(&path)
        .arg("--trace")
        .arg(&trace_path)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let summary = stdout_json(&output);
    assert_eq!(summary["steps"], 1);
    assert!((summary["tau"].as_f64().unwrap() - 4.0).abs() < 1e-12);

    let trace: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&trace_path).unwrap()).unwrap();
    let moved = &trace["steps"][0]["vertices_after"][2];
    assert!((moved[0].as_f64().unwrap() - 50.0 / 13.0).abs() < 1e-12);
    assert!((moved[1].as_f64().unwrap() - 29.0 / 13.0).abs() < 1e-12);
    assert_eq!(trace["steps"][0]["lid"], serde_json::json!([1, 3]));
}

#[test]
fn convexify_convex_input_takes_no_steps() {
    let dir = TempDir::new().unwrap();
    let path = write_file(&dir, "rectangle.json", RECTANGLE_JSON);
    let output = bin().arg("convexify").arg(&path).output().unwrap();
    assert!(output.status.success());
    let summary = stdout_json(&output);
    assert_eq!(summary["steps"], 0);
    assert_eq!(summary["tau"].as_f64().unwrap(), 0.0);
}

#[test]
fn convexify_random_corpus_terminates() {
    let output = bin()
        .args(["convexify", "--random", "--n", "8", "--count", "30", "--seed", "3"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let summary = stdout_json(&output);
    assert_eq!(summary["completed"], 30);
    assert_eq!(summary["all_final_convex"], true);
}

#[test]
fn convexify_rejects_self_crossing() {
    let dir = TempDir::new().unwrap();
    let path = write_file(&dir, "bowtie.json", BOWTIE_JSON);
    let output = bin().arg("convexify").arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn spectral_n4_reports_eigenvalues() {
    let dir = TempDir::new().unwrap();
    let csv_path = dir.path().join("eigs.csv");
    let output = bin()
        .args(["spectral", "--n", "4", "--csv"])
        .arg(&csv_path)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let report = stdout_json(&output);
    assert_eq!(report["passed"], true);
    let lambda = report["entries"][0]["lambda"].as_array().unwrap();
    let expected = [-4.0, 0.0, 4.0, 0.0];
    for (value, want) in lambda.iter().zip(expected) {
        assert!((value.as_f64().unwrap() - want).abs() < 1e-12);
    }
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("n,k,lambda,mu\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn spectral_range_sweeps() {
    let output = bin()
        .args(["spectral", "--n-range", "3:5"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let report = stdout_json(&output);
    assert_eq!(report["entries"].as_array().unwrap().len(), 3);
}

#[test]
fn spectral_emits_scaling_curves() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("scaling.csv");
    let output = bin()
        .args(["spectral", "--n", "6", "--directions", "3", "--scaling-csv"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "n,direction,epsilon,f_over_eps2,g_over_eps2,half_form_f,half_form_g"
    );
    // 3 directions × 4 epsilons.
    assert_eq!(lines.len(), 13);
}

#[test]
fn spectral_unreachable_tolerance_fails() {
    let output = bin()
        .args(["spectral", "--n", "4", "--tol", "1e-20"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn estimate_constant_is_deterministic() {
    let run = || {
        bin()
            .args(["estimate-constant", "--n", "4", "--restarts", "6", "--seed", "42"])
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    assert!(first.status.success(), "{first:?}");
    assert_eq!(first.stdout, second.stdout);
    let report = stdout_json(&first);
    assert!(report[0]["estimate"]["sup_ratio"].as_f64().unwrap() >= 1.0);
    assert!(report[0]["constants"]["c_theorem"].as_f64().unwrap() > 0.0);
}

#[test]
fn estimate_constant_usage_errors() {
    let zero = bin()
        .args(["estimate-constant", "--n", "4", "--restarts", "0"])
        .output()
        .unwrap();
    assert_eq!(zero.status.code(), Some(1));

    let no_size = bin().arg("estimate-constant").output().unwrap();
    assert_eq!(no_size.status.code(), Some(1));

    let both = bin()
        .args(["estimate-constant", "--n", "4", "--n-range", "3:5"])
        .output()
        .unwrap();
    assert_eq!(both.status.code(), Some(1));
}

#[test]
fn estimate_constant_csv_sweep() {
    let dir = TempDir::new().unwrap();
    let csv_path = dir.path().join("sweep.csv");
    let output = bin()
        .args(["estimate-constant", "--n-range", "4:6", "--restarts", "6", "--csv"])
        .arg(&csv_path)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,sup_ratio,limit_at_star");
    assert_eq!(lines.len(), 4);
}

#[test]
fn verify_quick_passes() {
    let output = bin().args(["verify", "--quick"]).output().unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(output.status.success(), "{stdout}");
    assert!(stdout.contains("acceptance: 10/10 criteria passed (quick)"));
    assert_eq!(stdout.matches("PASS").count(), 10);
}
