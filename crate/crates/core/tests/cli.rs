use std::process::{Command, Output};

use serde_json::Value;
use zalcman::cli::OutputEnvelope;

fn zalcman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zalcman"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn envelope(out: &Output) -> OutputEnvelope {
    serde_json::from_slice(&out.stdout).expect("stdout is an envelope")
}

#[test]
fn bound_examples() {
    let out = zalcman(&["bound", "--n", "3", "--lambda", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let env = envelope(&out);
    assert_eq!(env.schema_version, "1");
    assert_eq!(env.command, "bound");
    let bound = env.payload["bound"].as_f64().unwrap();
    assert!((bound - 5.0980762).abs() < 1e-7);

    let env = envelope(&zalcman(&["bound", "--n", "4", "--lambda", "1"]));
    assert_eq!(env.payload["bound"].as_f64(), Some(9.0));
    assert_eq!(env.payload["regime"], Value::from("LargeLambda"));
    assert!(env.payload["thresholds"]["lambda_large_min"].is_number());
}

#[test]
fn bound_rejects_small_n() {
    let out = zalcman(&["bound", "--n", "2", "--lambda", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n >= 3"));
}

#[test]
fn argument_errors_exit_2() {
    for args in [
        vec!["bound", "--n", "3"],
        vec!["bound", "--n", "x", "--lambda", "1"],
        vec!["bound", "--n", "3", "--lambda", "-1"],
        vec!["surface", "--n", "3", "--lambda", "1", "--grid", "1"],
        vec!["sweep", "--n", "3", "--lambda", "1", "--grid", "2"],
        vec!["verify", "--n-min", "5", "--n-max", "3"],
        vec!["verify", "--n-min", "2", "--n-max", "3"],
        vec!["nonsense"],
    ] {
        assert_eq!(zalcman(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn csv_bound_row() {
    let out = zalcman(&["--format", "csv", "bound", "--n", "3", "--lambda", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,lambda,regime,bound"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[2], "MiddleLambda");
    assert_eq!(
        row[3].parse::<f64>().unwrap(),
        (5.0 + 3.0 * 3f64.sqrt()) / 2.0
    );
}

#[test]
fn surface_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let out = zalcman(&[
        "surface",
        "--n",
        "3",
        "--lambda",
        "1",
        "--which",
        "F",
        "--grid",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let data = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<f64>> = data
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(data.lines().next(), Some("u,v,value"));
    assert_eq!(rows.len(), 9);
    let centre = rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).unwrap();
    assert_eq!(centre[2], 8.0);
    // row-major: u outer, v inner
    assert_eq!((rows[1][0], rows[1][1]), (-1.0, 0.0));
    assert_eq!(envelope(&out).payload["rows"], Value::from(9));
}

#[test]
fn surface_g_small_lambda() {
    let env = envelope(&zalcman(&[
        "surface", "--which", "G", "--n", "3", "--lambda", "0.5", "--grid", "101",
    ]));
    let max = &env.payload["max"];
    assert!(max["value"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(max["u"].as_f64(), Some(0.0));
    assert_eq!(max["v"].as_f64(), Some(0.0));
}

#[test]
fn surface_unwritable_path_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("f.csv");
    let out = zalcman(&[
        "surface",
        "--n",
        "3",
        "--lambda",
        "1",
        "--grid",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn critical_examples() {
    let env = envelope(&zalcman(&["critical", "--n", "3", "--lambda", "1"]));
    assert_eq!(env.payload["count"], Value::from(3));
    let pair = &env.payload["points"][1];
    assert!((pair["u"].as_f64().unwrap() + 0.2588).abs() < 1e-4);
    assert!((pair["v"].as_f64().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
    assert!((pair["f_value"].as_f64().unwrap() - 8.3923).abs() < 1e-4);

    let env = envelope(&zalcman(&["critical", "--n", "3", "--lambda", "1.25"]));
    assert_eq!(env.payload["count"], Value::from(1));
    let env = envelope(&zalcman(&["critical", "--n", "3", "--lambda", "3"]));
    assert_eq!(env.payload["count"], Value::from(1));
    assert!(env.payload["regime_note"]
        .as_str()
        .unwrap()
        .contains("outside"));
}

#[test]
fn sweep_examples() {
    let env = envelope(&zalcman(&[
        "sweep", "--n", "3", "--lambda", "2", "--grid", "512",
    ]));
    assert!((env.payload["sweep_max"].as_f64().unwrap() - 13.0).abs() < 1e-9);
    let env = envelope(&zalcman(&[
        "sweep", "--n", "3", "--lambda", "0.5", "--grid", "512",
    ]));
    assert!(env.payload["sweep_max"].as_f64().unwrap() <= 5.0 + 1e-9);
}

#[test]
fn verify_minimal_run_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let out = zalcman(&[
        "verify",
        "--n-min",
        "3",
        "--n-max",
        "3",
        "--lambda-samples",
        "1",
        "--random-samples",
        "0",
        "--grid",
        "128",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# flag corollary_n4_range:"));
    let records: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(records.iter().all(|l| l.starts_with("check_id=")));
    assert_eq!(
        records
            .iter()
            .filter(|l| l.starts_with("check_id=theorem "))
            .count(),
        3
    );

    let mirror: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.txt.json")).unwrap())
            .unwrap();
    assert_eq!(mirror["records"].as_array().unwrap().len(), records.len());
    assert_eq!(
        mirror["flags"][0]["name"],
        Value::from("corollary_n4_range")
    );
}

#[test]
fn envelope_round_trip_from_process() {
    let out = zalcman(&["critical", "--n", "5", "--lambda", "0.6"]);
    let env = envelope(&out);
    let again: OutputEnvelope =
        serde_json::from_str(&serde_json::to_string(&env).unwrap()).unwrap();
    assert_eq!(env, again);
    assert!(chrono::DateTime::parse_from_rfc3339(&env.generated_at).is_ok());
}
