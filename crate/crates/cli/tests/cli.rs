//! End-to-end checks of the gaussmap binary: exit codes, document round
//! trips, report determinism, and the text lines the verdicts promise.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussmap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf8 stderr")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("gaussmap_cli_{}_{name}", std::process::id()));
    fs::write(&path, contents).expect("temp file writes");
    path
}

#[test]
fn emitted_documents_round_trip_through_analyze() {
    let first = run(&["builtin", "so3xso3", "--param", "a=2", "--emit-doc"]);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let path = temp_file("roundtrip.json", &stdout(&first));
    let second = run(&["analyze", path.to_str().unwrap(), "--emit-doc"]);
    assert_eq!(second.status.code(), Some(0), "{}", stderr(&second));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn identical_runs_emit_identical_json_reports() {
    let args = ["builtin", "so3xso3", "--param", "a=2", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["input"]["dim"], serde_json::json!(6));
    assert_eq!(v["reports"][0]["task"], serde_json::json!("validate"));
}

#[test]
fn failing_tasks_keep_their_neighbours_and_exit_3() {
    let out = run(&["builtin", "so3", "--task", "nilpotent_geodesic", "--task", "validate"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("TASK nilpotent_geodesic: error ("), "{text}");
    assert!(text.contains("TASK validate: valid"), "{text}");
}

#[test]
fn parse_and_schema_problems_exit_2() {
    let cases = [
        ("malformed.json", "{ not json"),
        (
            "unknown_key.json",
            r#"{"algebra": {"dim": 2}, "metric": "identity", "surprise": 1}"#,
        ),
        (
            "diagonal_bracket.json",
            r#"{"algebra": {"dim": 3, "brackets": [{"i":1,"j":1,"k":0,"c":1.0}]}, "metric": "identity"}"#,
        ),
    ];
    for (name, text) in cases {
        let path = temp_file(name, text);
        let out = run(&["analyze", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(!stderr(&out).is_empty(), "{name} reports on stderr");
    }
    let unknown = run(&["builtin", "so4"]);
    assert_eq!(unknown.status.code(), Some(2));
    let missing = run(&["analyze", "/nonexistent/gaussmap-doc.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn heisenberg_line_report_shows_the_frozen_residual() {
    let out = run(&["builtin", "heisenberg3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("TASK validate: valid"), "{text}");
    assert!(text.contains("TASK nilpotent_geodesic: not harmonic"), "{text}");

    let json = run(&["builtin", "heisenberg3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    let geo = &v["reports"][1]["details"]["directions"][0];
    assert!((geo["residual_norm"].as_f64().unwrap() - 0.25).abs() <= 1e-12);
    assert!((geo["jzx_norm"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
    assert_eq!(geo["harmonic"], serde_json::json!(false));
}

#[test]
fn witness_task_produces_a_metric_and_exits_0() {
    let out = run(&["builtin", "so3xso3", "--param", "a=1", "--task", "witness"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("TASK witness: nonharmonic biinvariant metric produced"),
        "{text}"
    );
    assert!(text.contains("witness_metric[0] = ["), "{text}");
    assert!(text.contains("residual_max_under_witness = "), "{text}");
}

#[test]
fn neg_killing_documents_analyze_cleanly() {
    let text = r#"{
  "algebra": {"dim": 3, "brackets": [
    {"i":0,"j":1,"k":2,"c":1.0}, {"i":1,"j":2,"k":0,"c":1.0}, {"i":0,"j":2,"k":1,"c":-1.0}
  ]},
  "metric": "neg_killing",
  "subspace": [[1.0, 0.0, 0.0]],
  "tasks": ["validate", "classify_structure", "harmonicity_tg"]
}"#;
    let path = temp_file("neg_killing.json", text);
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let s = stdout(&out);
    assert!(s.contains("TASK validate: valid"), "{s}");
    assert!(s.contains("TASK harmonicity_tg: harmonic"), "{s}");
}

#[test]
fn tolerance_flag_loosens_the_verdict() {
    let strict = run(&["builtin", "so3xso3", "--param", "a=2", "--task", "harmonicity_tg"]);
    assert!(stdout(&strict).contains("TASK harmonicity_tg: not harmonic"));
    let loose = run(&[
        "builtin",
        "so3xso3",
        "--param",
        "a=2",
        "--task",
        "harmonicity_tg",
        "--tol",
        "1",
    ]);
    assert!(
        stdout(&loose).contains("TASK harmonicity_tg: harmonic"),
        "{}",
        stdout(&loose)
    );
}

#[test]
fn task_flag_rejects_unknown_names() {
    let out = run(&["builtin", "so3", "--task", "frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("frobnicate"));
}
