use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn stepharm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stepharm"))
        .args(args)
        .env("STEPHARM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect()).collect()
}

#[test]
fn levels_counts() {
    let o = stepharm(&["levels", "--beta0", "4.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,beta_n,energy_over_hbar_omega,k_n,marginal\n"));
    assert_eq!(text.lines().count(), 3);
    assert!(!text.contains('\r'));

    let o = stepharm(&["levels", "--beta0", "0.7"]);
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = stepharm(&["levels", "--beta0", "1.0"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().ends_with(",true"));
}

#[test]
fn json_document_shape() {
    let o = stepharm(&["levels", "--beta0", "4.5", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let obj = v.as_object().unwrap();
    assert_eq!(obj.len(), 2);
    for key in ["command", "parameters", "tool_version", "timestamp"] {
        assert!(v["manifest"].get(key).is_some(), "manifest lacks {key}");
    }
    let rows = v["data"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["n"], 1);
}

#[test]
fn csv_file_gets_manifest_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res.csv");
    let o = stepharm(&["resonances", "--beta0", "1.5", "--beta-max", "10", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let side = stepharm_cli::manifest_path(&out);
    let manifest: Value = serde_json::from_str(&fs::read_to_string(side).unwrap()).unwrap();
    assert_eq!(manifest["command"], "resonances");
    assert_eq!(manifest["parameters"]["beta_max"], 10.0);
    let peaks: Vec<f64> = data_rows(&fs::read_to_string(out).unwrap()).iter().map(|r| r[0]).collect();
    for target in [3.0, 5.0, 7.0] {
        assert!(peaks.iter().any(|p| (p - target).abs() < 0.2));
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["delay", "--beta0", "1.5", "--beta-min", "1.6", "--beta-max", "30", "--steps", "300"];
    let a = stdout(&stepharm(&args));
    let b = stdout(&stepharm(&args));
    assert_eq!(a, b);
    let json = |_: ()| {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--format", "json"]);
        let v: Value = serde_json::from_str(&stdout(&stepharm(&full))).unwrap();
        v["data"].clone()
    };
    assert_eq!(json(()), json(()));
}

#[test]
fn delay_curve_shape() {
    let o = stepharm(&["delay", "--beta0", "1.5", "--beta-min", "1.6", "--beta-max", "400", "--steps", "400"]);
    let rows = data_rows(&stdout(&o));
    let tail = rows.last().unwrap()[1];
    assert!((tail - 1.0).abs() < 0.02, "tail {tail}");
    let o = stepharm(&["delay", "--beta0", "4", "--beta-min", "4.0001", "--beta-max", "5", "--steps", "10"]);
    assert!(data_rows(&stdout(&o))[0][1].abs() < 0.05);
}

#[test]
fn exit_codes() {
    assert_eq!(stepharm(&["levels", "--beta0", "2", "--u0", "1"]).status.code(), Some(2));
    assert_eq!(stepharm(&["levels"]).status.code(), Some(2));
    assert_eq!(stepharm(&["levels", "--beta0", "0.2"]).status.code(), Some(2));
    assert_eq!(stepharm(&["frobnicate"]).status.code(), Some(2));
    let o = stepharm(&["delay", "--beta0", "1.5", "--beta-min", "1.5", "--beta-max", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = stepharm(&["eigenfunction", "--beta0", "1.5", "-n", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_stepharm"))
        .args(["levels", "--beta0", "2"])
        .env("STEPHARM_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn physical_units() {
    let o = stepharm(&["levels", "--hbar", "1", "--mass", "1", "--kappa", "4", "--u0", "8"]);
    assert_eq!(o.status.code(), Some(0));
    // ω = 2, β₀ = 8/2 + 1/2 = 4.5
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    let reference = data_rows(&stdout(&stepharm(&["levels", "--beta0", "4.5"])));
    assert!((rows[0][1] - reference[0][1]).abs() < 1e-10);
}

#[test]
fn eigenfunction_table() {
    let o = stepharm(&["eigenfunction", "--beta0", "4.5", "-n", "1", "--x-min", "-6", "--x-max", "4", "--points", "1001"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    let mass: f64 = rows.windows(2).map(|w| 0.5 * (w[1][0] - w[0][0]) * (w[0][3] + w[1][3])).sum();
    assert!((mass - 1.0).abs() < 1e-3, "norm {mass}");
    let sign_changes = rows.windows(2).filter(|w| w[0][1].signum() != w[1][1].signum() && w[0][1].abs() > 1e-8).count();
    assert_eq!(sign_changes, 1);
}

#[test]
fn wavepacket_summary() {
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("frames.csv");
    let summary = dir.path().join("summary.csv");
    let run = |extra: &[&str]| {
        let mut args = vec![
            "wavepacket", "--beta0", "1.5", "--beta-center", "6", "--frames", "3", "--points", "200",
            "-o", frames.to_str().unwrap(), "--summary", summary.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let o = stepharm(&args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = fs::read_to_string(&summary).unwrap();
        let header: Vec<String> = text.lines().next().unwrap().split(',').map(String::from).collect();
        let values: Vec<String> = text.lines().nth(1).unwrap().split(',').map(String::from).collect();
        move |name: &str| values[header.iter().position(|h| h == name).unwrap()].clone()
    };
    let normal = run(&[]);
    assert!(normal("relative_difference").parse::<f64>().unwrap() < 0.05);
    let mirror = run(&["--mirror"]);
    assert!(mirror("measured_delay_omega_over_pi").parse::<f64>().unwrap().abs() < 0.02);
    assert_eq!(fs::read_to_string(&frames).unwrap().lines().count(), 1 + 3 * 200);
    assert!(Path::new(&stepharm_cli::manifest_path(&frames)).exists());
}

#[test]
fn wavepacket_rejects_bad_packets() {
    let o = stepharm(&["wavepacket", "--beta0", "1.5", "--k-center", "1", "--sigma-k", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_and_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = stepharm(&["verify", "--report", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("checks passed"));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let rows = v["data"].as_array().unwrap();
    assert!(rows.len() >= 10);
    assert!(rows.iter().all(|r| r["pass"] == true && r["residual"].is_number()));

    let o = stepharm(&["verify", "--report", report.to_str().unwrap(), "--inject-fault", "gamma"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}
