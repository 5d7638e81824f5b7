use std::process::{Command, Output};

use serde_json::Value;

fn stator(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stator"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = stator(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn curves_csv_layout_and_round_trip() {
    let text = stdout(&["curves", "--b", "1.001", "--format", "csv"]);
    assert!(text.starts_with("n,xi,E0,E0_exact,EFPT,F\n"));
    assert!(!text.contains('\r'));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = 0;
    for record in reader.records() {
        let record = record.unwrap();
        assert_eq!(record.len(), 6);
        for field in record.iter() {
            let (_, decimals) = field.split_once('.').expect("fixed notation");
            assert_eq!(decimals.len(), 6, "{field}");
            let v: f64 = field.parse().unwrap();
            assert_eq!(format!("{v:.6}"), field);
        }
        rows += 1;
    }
    assert_eq!(rows, 2000);
}

#[test]
fn plan_json_values() {
    let v: Value = serde_json::from_str(&stdout(&["plan", "--xi", "0.17"])).unwrap();
    assert_eq!(v["technique"], "improved");
    assert!((v["E0"].as_f64().unwrap() - 0.897).abs() < 2e-3);
    assert!((v["F"].as_f64().unwrap() - 0.856).abs() < 2e-3);
    assert!(v["n"].as_f64().unwrap() > 1.5);

    let v: Value = serde_json::from_str(&stdout(&["plan", "--xi", "0.4"])).unwrap();
    assert_eq!(v["technique"], "fpt");
    assert!((v["E"].as_f64().unwrap() - 0.969).abs() < 2e-3);
}

#[test]
fn fpt_maximal_case() {
    let v: Value = serde_json::from_str(&stdout(&[
        "fpt", "--xi", "0.5", "--F", "1.0", "--format", "json",
    ]))
    .unwrap();
    assert_eq!(v["command"], "fpt");
    assert!((v["F"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["E"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["classical_bits"], 2);
    let branches = v["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 8);
    // 4×4 operator as rows of [re, im] pairs.
    let op = branches[0]["conditional_operator"].as_array().unwrap();
    assert_eq!(op.len(), 4);
    assert_eq!(op[0].as_array().unwrap().len(), 4);
    assert_eq!(op[0][0].as_array().unwrap().len(), 2);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2)
        .map(|i| dir.path().join(format!("run{i}.json")))
        .collect();
    for p in &paths {
        let out = stator(&[
            "improved",
            "--xi",
            "0.3",
            "--n",
            "1.8",
            "--b",
            "1.2",
            "--axis-a",
            "0.6,0,0.8",
            "--axis-b",
            "y",
            "--seed",
            "7",
            "--format",
            "json",
            "--output",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
}

#[test]
fn multiparty_ledger() {
    let v: Value = serde_json::from_str(&stdout(&[
        "multiparty",
        "--xi",
        "0.3",
        "--N",
        "3",
        "--axis-c",
        "x",
        "--format",
        "json",
    ]))
    .unwrap();
    assert_eq!(v["classical_bits"], 6);
    assert!((v["F"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn small_angle_csv() {
    let text = stdout(&["smallxi", "--xi", "0.2", "--target", "2"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("path,probability,success,distance"));
    assert!(lines.any(|l| l.contains("B10") && l.contains(",true,")));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(stator(&["improved", "--xi", "0.3"]).status.code(), Some(2));
    assert_eq!(
        stator(&["deterministic", "--xi", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(stator(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        stator(&["plan", "--xi", "0.2", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        stator(&["deterministic", "--xi", "0.2", "--target", "9"])
            .status
            .code(),
        Some(2)
    );
    let out = stator(&[
        "plan",
        "--xi",
        "0.2",
        "--output",
        "/nonexistent/dir/out.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_all_passes() {
    let out = stator(&["verify-all", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
    assert!(text.contains("[INFO]"));
}
