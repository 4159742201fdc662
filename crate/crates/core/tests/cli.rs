use std::process::{Command, Output};

use serde_json::Value;

fn qcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcap")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(qcap(&["--help"]).status.code(), Some(0));
    let v = qcap(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&v.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn table1_reports_all_rows() {
    let v = json(&qcap(&["table1"]));
    let rows = v["result"]["rows"].as_array().expect("rows");
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(row["within_tolerance"], Value::Bool(true), "{row}");
    }
}

#[test]
fn capacity_of_preset() {
    let v = json(&qcap(&["capacity", "ce", "--preset", "erasure:2,0.5"]));
    assert!((v["result"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(v["config"]["tol"].is_number());
}

#[test]
fn capacity_from_spec_file() {
    let dir = std::env::temp_dir().join(format!("qcap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spec.json");
    std::fs::write(&path, r#"{"kind": "amplitude_damping", "params": {"p": 0.5}}"#).unwrap();
    let v = json(&qcap(&["capacity", "ce", "--spec", path.to_str().unwrap()]));
    let (expected, _) = qcap::capacity::ad_ce(0.5).unwrap();
    assert!((v["result"]["value"].as_f64().unwrap() - expected).abs() < 1e-6);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn sweep_rows_follow_requested_order() {
    let out = qcap(&["sweep", "ad", "--p", "0.99,0.5,0.9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,ce,ch,ratio"));
    let ps: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ps, ["0.99", "0.5", "0.9"]);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("config:"));
}

#[test]
fn gaussian_csv_shape() {
    let out = qcap(&["gaussian", "--s", "0.1,1", "--n", "1,10", "--k", "1", "--with-limit"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].ends_with(",limit"));
    assert!(lines.iter().all(|l| l.split(',').count() == 12));
}

#[test]
fn rst_commands() {
    let v = json(&qcap(&["rst", "verify-exact", "--bsc", "0.3", "--n", "2"]));
    assert_eq!(v["result"]["exact"], Value::Bool(true));

    let v = json(&qcap(&["rst", "transcript", "--bsc", "0.2", "--n", "6", "--x", "011010", "--seed", "4"]));
    assert_eq!(v["result"]["consistent"], Value::Bool(true));
    let tr = &v["result"]["transcript"];
    assert_eq!(tr["message"].as_str().unwrap().len() as u64, tr["bits_sent"].as_u64().unwrap());

    let a = qcap(&["rst", "simulate", "--bsc", "0.1", "--n", "8", "--trials", "300", "--seed", "9"]);
    let b = qcap(&["rst", "simulate", "--bsc", "0.1", "--n", "8", "--trials", "300", "--seed", "9"]);
    assert_eq!(json(&a), json(&b));
    assert_eq!(json(&a)["result"]["receiver_mismatches"], Value::from(0));
}

#[test]
fn typical_check_flags() {
    let v = json(&qcap(&["typical", "check", "--probs", "0.7,0.3", "--n", "20", "--delta", "0.1"]));
    let flags: Vec<bool> = v["result"]["bounds_ok"].as_array().unwrap().iter().map(|b| b.as_bool().unwrap()).collect();
    assert_eq!(flags, [false, true, true]);
    assert_eq!(v["result"]["all_ok"], Value::Bool(false));
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(qcap(&["capacity", "ce"]).status.code(), Some(2));
    assert_eq!(qcap(&["capacity", "ce", "--preset", "nonsense:1"]).status.code(), Some(2));
    assert_eq!(qcap(&["rst", "verify-exact", "--bsc", "1.5", "--n", "2"]).status.code(), Some(2));
    assert_eq!(qcap(&["capacity", "ce", "--spec", "/nonexistent/spec.json"]).status.code(), Some(2));
    let out = qcap(&["typical", "check", "--probs", "0.7,0.2", "--n", "4", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}
