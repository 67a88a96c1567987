//! End-to-end checks of the binary: exit codes, report files, replay, table
//! output, literal evaluation, and custom geometry files.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vircheck"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("vircheck-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn verify_pass_exit_zero() {
    let out = bin().args(["verify", "thaddeus"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS suite=thaddeus"));
}

#[test]
fn unknown_suite_exit_two() {
    let out = bin().args(["verify", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_geometry_exit_two() {
    let out = bin()
        .args(["verify", "desc-bracket", "--geometry", "torus:9"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_written_and_replayable() {
    let path = tmp("report.json");
    let out = bin()
        .args([
            "verify",
            "thaddeus",
            "--g",
            "2..3",
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["status"], "pass");
    assert_eq!(report["suite"], "thaddeus");
    assert!(report["fingerprint"].as_str().unwrap().len() >= 8);
    // fabricate a counterexample pointing at a real case and replay it
    report["status"] = serde_json::json!("fail");
    report["first_counterexample"] = serde_json::json!({
        "case": "spot/g=2/(3,0,0)",
        "inputs": "g=2 (3,0,0)",
        "expected": "-4",
        "got": "?"
    });
    std::fs::write(&path, serde_json::to_string(&report).unwrap()).unwrap();
    let replay = bin()
        .args(["verify", "thaddeus", "--replay", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(replay.status.success());
    let stdout = String::from_utf8_lossy(&replay.stdout);
    assert!(stdout.contains("now passes"), "{stdout}");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn reports_byte_identical_modulo_wall_time() {
    let run = || {
        let path = tmp("det-report.json");
        let out = bin()
            .args(["verify", "sym", "--g", "0..1", "--n", "1..2", "--out"])
            .arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success());
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let _ = std::fs::remove_file(&path);
        v["wall_time_ms"] = serde_json::json!(0);
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn thaddeus_table_tsv() {
    let out = bin()
        .args(["table", "thaddeus", "--g", "2", "--format", "tsv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("2\t3\t0\t0\t-4"));
    assert!(stdout.contains("2\t1\t1\t0\t4"));
    assert!(stdout.contains("2\t0\t0\t1\t-4"));
}

#[test]
fn eval_desc_canonical_form() {
    let out = bin()
        .args([
            "eval",
            "desc",
            "chH[1](pt)",
            "--geometry",
            "curve:0",
            "--apply",
            "Lwt0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("-1·chH[0](pt) + 1·chH[0](pt)^3"),
        "{stdout}"
    );
}

#[test]
fn eval_state_weights() {
    let out = bin()
        .args([
            "eval",
            "state",
            "e[]*v[F.pt,-2]",
            "--geometry",
            "curve:1",
            "--apply",
            "L:0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"coefficient\": \"2\""), "{stdout}");
}

#[test]
fn custom_geometry_file() {
    let path = tmp("geometry.json");
    std::fs::write(
        &path,
        r#"{
            "dimension": 1,
            "basis": [
                {"name": "1", "p": 0, "q": 0},
                {"name": "pt", "p": 1, "q": 1}
            ],
            "cup": [],
            "integral": [{"b": "pt", "c": "1"}],
            "todd": [{"b": "1", "c": "1"}, {"b": "pt", "c": "1"}]
        }"#,
    )
    .unwrap();
    let out = bin()
        .args([
            "verify",
            "desc-bracket",
            "--geometry",
            &format!("file:{}", path.display()),
            "--kmax",
            "2",
            "--degmax",
            "6",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let _ = std::fs::remove_file(&path);
}

#[test]
fn invalid_custom_geometry_exit_two() {
    let path = tmp("bad-geometry.json");
    // cup table violating supercommutativity: e·e = pt for an odd class
    std::fs::write(
        &path,
        r#"{
            "dimension": 1,
            "basis": [
                {"name": "1", "p": 0, "q": 0},
                {"name": "e1", "p": 0, "q": 1},
                {"name": "f1", "p": 1, "q": 0},
                {"name": "pt", "p": 1, "q": 1}
            ],
            "cup": [{"i": "e1", "j": "e1", "value": [{"b": "pt", "c": "1"}]}],
            "integral": [{"b": "pt", "c": "1"}],
            "todd": [{"b": "1", "c": "1"}]
        }"#,
    )
    .unwrap();
    let out = bin()
        .args([
            "verify",
            "desc-bracket",
            "--geometry",
            &format!("file:{}", path.display()),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(&path);
}
