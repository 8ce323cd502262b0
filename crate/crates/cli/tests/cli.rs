use std::process::{Command, Output};

use serde_json::Value;

fn qcantor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcantor"))
        .args(args)
        .env_remove("QCANTOR_PRECISION_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn eta_digits_json() {
    let o = qcantor(&["eta-digits", "--positions", "1..18", "--output", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    let mut expect: Vec<String> = Vec::new();
    for _ in 0..6 {
        expect.extend(["0".into(), "2".into()]);
    }
    expect.extend(["0", "0", "0", "6", "6", "6"].map(String::from));
    assert_eq!(strings(&v["digits"]), expect);
    assert_eq!(v["start"], "1");
    assert_eq!(v["E0"], "0");
}

#[test]
fn expand_quarter() {
    let o = qcantor(&["expand", "--x", "1/4", "--N", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(strings(&v["digits"]), ["0", "2"]);
    assert_eq!(strings(&v["bases"]), ["2", "4"]);
}

#[test]
fn verify_bounds_k1_row() {
    let o = qcantor(&["verify-bounds", "--lemma", "k1", "--b", "2", "--n", "65536", "--eps", "1/8"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = rdr.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    let get = |name: &str| rows[0][headers.iter().position(|h| h == name).unwrap()].to_string();
    assert_eq!(get("verdict"), "TRUE");
    assert_eq!(get("precondition_ok"), "true");
    for col in ["lhs", "rhs_bound", "precision_used", "seconds"] {
        assert!(headers.iter().any(|h| h == col), "{col}");
    }
}

#[test]
fn verify_bounds_flags_preconditions_and_keeps_grid_order() {
    let o = qcantor(&["verify-bounds", "--lemma", "k1", "--b", "2", "--n", "64", "--eps", "1/2,1/4,1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let eps: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(eps, ["1/2", "1/4", "1"]);
    assert!(text.lines().skip(1).all(|l| l.contains(",false,")));
}

#[test]
fn transform_reports_diff() {
    let o = qcantor(&["transform", "--s", "1/8", "--source", "eta", "--positions", "1..30"]);
    assert!(o.status.success());
    let v = json(&o);
    let diff: Vec<u64> = strings(&v["diff"]).iter().map(|s| s.parse().unwrap()).collect();
    assert!(!diff.is_empty() && diff.iter().all(|&n| n <= 3));
}

#[test]
fn stats_csv_columns() {
    let o = qcantor(&["stats", "--source", "eta", "--block", "0,2", "--checkpoints", "4,12"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,count,qnk,ratio_exact,ratio_decimal"));
    assert!(lines.next().unwrap().starts_with("4,2,"));
}

#[test]
fn discrepancy_of_a_segment() {
    let o = qcantor(&["discrepancy", "--positions", "1..2"]);
    assert!(o.status.success());
    // Ratios {0, 1/2}.
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",1/2,0.5"));
}

#[test]
fn segment_row() {
    let o = qcantor(&["segment", "--i", "3", "--j", "1", "--block", "0"]);
    assert!(o.status.success());
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("3,1,13,18,3,13/12,"), "{row}");
}

#[test]
fn theta_round_trip_through_check() {
    let dir = std::env::temp_dir().join(format!("qcantor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("theta.json");
    let o = qcantor(&[
        "theta-sample",
        "--seed",
        "3",
        "--positions",
        "13..400",
        "--output-path",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let o = qcantor(&["theta-check", "--input", path.to_str().unwrap()]);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("true,"));

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["digits"][0] = Value::from("2");
    std::fs::write(&path, v.to_string()).unwrap();
    let o = qcantor(&["theta-check", "--input", path.to_str().unwrap()]);
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "false,13,388");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn theta_sample_is_empty_over_the_first_region() {
    let o = qcantor(&["theta-sample", "--positions", "1..4"]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "empty_digit_set");
}

#[test]
fn params_and_dim_ratio() {
    let o = qcantor(&["params", "--max-i", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("\n4,4,1,48,576,5,2,2,"));

    let o = qcantor(&["dim-ratio", "--i", "20"]);
    assert!(o.status.success());
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.ends_with(",true"), "{row}");
    assert!(row.contains(",0.6286"), "{row}");
}

#[test]
fn output_is_deterministic() {
    let args = ["theta-sample", "--seed", "42", "--positions", "2869..3100", "--output", "csv"];
    assert_eq!(qcantor(&args).stdout, qcantor(&args).stdout);
    let args = ["verify-bounds", "--lemma", "epsilonk", "--b", "2", "--n", "12", "--k", "2", "--eps", "1/4,1/2"];
    assert_eq!(qcantor(&args).stdout, qcantor(&args).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(qcantor(&["expand", "--x", "1/0", "--N", "2"]).status.code(), Some(65));
    assert_eq!(qcantor(&["expand", "--frobnicate"]).status.code(), Some(64));
    assert_eq!(qcantor(&["no-such-command"]).status.code(), Some(64));

    let o = qcantor(&["eta-digits", "--positions", "0..3"]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "invalid_position");
    assert!(err["message"].as_str().unwrap().contains("positions start at 1"));

    let o = qcantor(&[
        "transform",
        "--r",
        "-1",
        "--source",
        "rational:1/4",
        "--positions",
        "1..3",
        "--lookahead-cap",
        "64",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = qcantor(&["verify-bounds", "--lemma", "epsilonk", "--b", "2", "--n", "40", "--eps", "1/4", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precision_cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qcantor"))
        .args(["verify-bounds", "--lemma", "k1", "--b", "2", "--n", "256", "--eps", "1/4"])
        .env("QCANTOR_PRECISION_CAP", "64")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",64,"));
    let o = Command::new(env!("CARGO_BIN_EXE_qcantor"))
        .args(["verify-bounds", "--lemma", "k1", "--b", "2", "--n", "256", "--eps", "1/4"])
        .env("QCANTOR_PRECISION_CAP", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(64));
}
