use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const IDENTITY: &str = r#"{"schema": 1,
 "channel": {"standard": {"kind": "identity", "dim": 2}},
 "constraint": {"observable": {"diagonal": [0, 1]}, "energy": 0.5},
 "state": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]],
 "sweep": {"energies": [0.1, 0.2, 0.3]}}"#;

fn qcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcap"))
        .args(args)
        .output()
        .expect("qcap runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn run_json(problem: &Path, args: &[&str]) -> Value {
    let mut all = vec!["--problem", problem.to_str().unwrap()];
    all.extend_from_slice(args);
    json(&qcap(&all))
}

fn value(v: &Value, key: &str) -> f64 {
    v["values"][key].as_f64().unwrap()
}

#[test]
fn info_on_maximally_mixed_qubit() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", IDENTITY);
    let nats = run_json(&p, &["info"]);
    let ln2 = std::f64::consts::LN_2;
    assert!((value(&nats, "mutual_information") - 2.0 * ln2).abs() < 1e-10);
    assert_eq!(nats["units"], "nats");

    let bits = run_json(&p, &["info", "--bits"]);
    assert!((value(&bits, "mutual_information") - 2.0).abs() < 1e-10);
    for key in ["input_entropy", "output_entropy", "mutual_information"] {
        assert!((value(&bits, key) - value(&nats, key) / ln2).abs() < 1e-12);
    }
}

#[test]
fn pure_input_carries_no_mutual_information() {
    let dir = TempDir::new().unwrap();
    let text = IDENTITY.replace(
        r#""state": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]"#,
        r#""state": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]"#,
    );
    let p = write(&dir, "p.json", &text);
    let v = run_json(&p, &["info"]);
    assert!(value(&v, "mutual_information").abs() < 1e-10);
}

#[test]
fn infeasible_energy_exits_2() {
    let dir = TempDir::new().unwrap();
    let text = IDENTITY.replace("[0, 1]", "[1, 2]");
    let p = write(&dir, "p.json", &text);
    let out = qcap(&["ea-capacity", "--problem", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_2_and_name_the_field() {
    let dir = TempDir::new().unwrap();
    let text = IDENTITY.replace(r#""energy": 0.5"#, r#""energy": "high""#);
    let p = write(&dir, "p.json", &text);
    let out = qcap(&["ea-capacity", "--problem", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("constraint.energy"), "{err}");

    let out = qcap(&["ea-capacity", "--problem", "/nonexistent/p.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ea_capacity_is_certified_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", IDENTITY);
    let mut a = run_json(&p, &["ea-capacity", "--seed", "7"]);
    let mut b = run_json(&p, &["ea-capacity", "--seed", "7"]);
    assert!((value(&a, "capacity") - 2.0 * 2.0_f64.ln()).abs() < 1e-5);
    assert!(a["flags"]
        .as_array()
        .unwrap()
        .contains(&Value::from("certified")));
    assert!(a["duality_gap"].as_f64().unwrap() <= 1e-6);
    a["wall_time_s"] = Value::Null;
    b["wall_time_s"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn holevo_is_flagged_heuristic() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", IDENTITY);
    let v = run_json(&p, &["holevo", "--m", "2"]);
    assert!(v["flags"]
        .as_array()
        .unwrap()
        .contains(&Value::from("HEURISTIC")));
    assert!(v["duality_gap"].is_null());
    assert!((value(&v, "chi") - 2.0_f64.ln()).abs() < 1e-5);
}

#[test]
fn out_flag_writes_the_record_to_a_file() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", IDENTITY);
    let dest = dir.path().join("r.json");
    let out = qcap(&[
        "info",
        "--problem",
        p.to_str().unwrap(),
        "--out",
        dest.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dest).unwrap()).unwrap();
    assert_eq!(v["command"], "info");
}

#[test]
fn sweep_csv_has_full_precision_rows() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", IDENTITY);
    let out = qcap(&["sweep", "--problem", p.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "E,C_ea,chi_heuristic,G_lower_bound_based,gap,status"
    );
    assert_eq!(lines.len(), 4);
    for (line, e) in lines[1..].iter().zip([0.1, 0.2, 0.3]) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6);
        assert_eq!(fields[0].parse::<f64>().unwrap(), e);
        let mantissa = fields[1].split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17, "{line}");
        assert_eq!(fields[5], "ok");
    }
}

#[test]
fn verify_passes_and_corruption_is_caught() {
    let out = qcap(&["verify", "entropy"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));

    let out = qcap(&["verify", "entropy", "--corrupt", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = qcap(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
