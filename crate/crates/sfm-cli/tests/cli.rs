//! End-to-end tests against the built binary: exit codes, output documents,
//! determinism, tracing and the gen/solve round trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sfm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sfm"))
}

fn write_fixture(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn table_fixture(dir: &Path) -> PathBuf {
    write_fixture(
        dir,
        "table.json",
        r#"{"type":"table","labels":["a","b"],"values":[0,-1,2,1]}"#,
    )
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

#[test]
fn solve_scaling_on_table_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let input = table_fixture(dir.path());
    let out = sfm()
        .args(["solve", input.to_str().unwrap(), "--algorithm", "scaling", "--verify"])
        .output()
        .unwrap();
    let doc = stdout_json(&out);
    assert_eq!(doc["minimizer"], serde_json::json!(["a"]));
    assert_eq!(doc["value"], serde_json::json!("-1"));
    assert!(doc["certificate"]["bases"].is_array());
}

#[test]
fn solve_strong_matches_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let input = table_fixture(dir.path());
    let out = sfm()
        .args(["solve", input.to_str().unwrap(), "--algorithm", "strong", "--verify"])
        .output()
        .unwrap();
    let doc = stdout_json(&out);
    assert_eq!(doc["minimizer"], serde_json::json!(["a"]));
    assert_eq!(doc["value"], serde_json::json!("-1"));
    assert!(doc["certificate"].is_null());
}

#[test]
fn solve_brute_and_output_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = table_fixture(dir.path());
    let result = dir.path().join("result.json");
    let out = sfm()
        .args([
            "solve",
            input.to_str().unwrap(),
            "--algorithm",
            "brute",
            "--output",
            result.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(doc["value"], serde_json::json!("-1"));
}

#[test]
fn non_submodular_table_is_rejected_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(
        dir.path(),
        "bad.json",
        r#"{"type":"table","labels":["a","b"],"values":[0,0,0,5]}"#,
    );
    let out = sfm().args(["solve", input.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("submodularity violated at"), "{stderr}");
}

#[test]
fn malformed_file_exits_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path(), "broken.json", "{\"type\":\"table\",\n!");
    let out = sfm().args(["solve", input.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    let missing = dir.path().join("nope.json");
    let out = sfm().args(["solve", missing.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rational_instance_requires_epsilon_for_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path(), "half.cut", "cut 2 1 undirected\n0 1 1/2\n");
    let out = sfm().args(["solve", input.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = sfm()
        .args(["solve", input.to_str().unwrap(), "--epsilon", "1/2", "--verify"])
        .output()
        .unwrap();
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], serde_json::json!("0"));
}

#[test]
fn gen_is_byte_identical_across_runs() {
    let a = sfm().args(["gen", "cut", "6", "42"]).output().unwrap();
    let b = sfm().args(["gen", "cut", "6", "42"]).output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("cut 6 "));
    // the flag form works too
    let c = sfm().args(["gen", "cut", "6", "--seed", "42"]).output().unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn gen_then_solve_round_trip_for_every_family() {
    let dir = tempfile::tempdir().unwrap();
    for family in ["table", "cut", "coverage", "matroid", "concave"] {
        let inst = dir.path().join(format!("{family}.inst"));
        let out = sfm()
            .args(["gen", family, "5", "7", "--output", inst.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out.status.success(), "{family}");
        let solve = sfm()
            .args(["solve", inst.to_str().unwrap(), "--verify"])
            .output()
            .unwrap();
        let doc = stdout_json(&solve);
        assert!(doc["value"].is_string(), "{family}");
    }
}

#[test]
fn unknown_family_and_algorithm_are_input_errors() {
    let out = sfm().args(["gen", "mystery", "4", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let input = table_fixture(dir.path());
    let out = sfm()
        .args(["solve", input.to_str().unwrap(), "--algorithm", "psychic"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = table_fixture(dir.path());
    let run = || {
        sfm()
            .args(["solve", input.to_str().unwrap(), "--verify"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn trace_flag_writes_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let input = table_fixture(dir.path());
    let trace = dir.path().join("events.jsonl");
    let out = sfm()
        .args([
            "solve",
            input.to_str().unwrap(),
            "--trace",
            trace.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let body = std::fs::read_to_string(&trace).unwrap();
    let mut phases = 0;
    for line in body.lines() {
        let ev: serde_json::Value = serde_json::from_str(line).unwrap();
        if ev["event"] == "phase" {
            phases += 1;
            assert!(ev["delta"].is_string());
        }
    }
    assert!(phases > 0);
}

#[test]
fn emitted_certificate_round_trips_through_reverification() {
    let dir = tempfile::tempdir().unwrap();
    let input = table_fixture(dir.path());
    let out = sfm()
        .args(["solve", input.to_str().unwrap()])
        .output()
        .unwrap();
    let doc = stdout_json(&out);
    let cert: sfm_core::certificate::CertificateDoc =
        serde_json::from_value(doc["certificate"].clone()).unwrap();
    let family = sfm_core::instance::parse_instance(
        &std::fs::read_to_string(&input).unwrap(),
    )
    .unwrap();
    let oracle = family.build_oracle().unwrap();
    let report = sfm_core::verify::check_certificate(
        &oracle,
        &cert,
        &sfm_core::rational::rat_int(1),
    );
    assert!(report.pass, "{:?}", report.failure);
}
