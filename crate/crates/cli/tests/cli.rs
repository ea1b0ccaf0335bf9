//! End-to-end tests running the built binary: exit codes, report formats,
//! and the extract → verify round trip.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn write_algebra(dir: &tempfile::TempDir, name: &str, json: &str) -> PathBuf {
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(json.as_bytes()).unwrap();
    path
}

fn relcomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relcomm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn z2_json() -> &'static str {
    r#"{"name":"z2","size":2,"operations":[{"name":"plus","arity":2,"table":[0,1,1,0]}]}"#
}

fn set2_json() -> &'static str {
    r#"{"name":"set2","size":2,"operations":[]}"#
}

fn maj2_json() -> &'static str {
    r#"{"name":"maj2","size":2,"operations":[{"name":"maj","arity":3,"table":[0,0,0,1,0,1,1,1]}]}"#
}

#[test]
fn info_prints_signature_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let alg = write_algebra(&dir, "z2.json", z2_json());
    let out = relcomm(&["info", "--algebra", alg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("plus/2"), "{text}");
    assert!(text.contains("congruences: 2"), "{text}");
}

#[test]
fn check_suite_on_z2_exits_1_with_the_witness() {
    let dir = tempfile::tempdir().unwrap();
    let alg = write_algebra(&dir, "z2.json", z2_json());
    let out = relcomm(&[
        "check",
        "--algebra",
        alg.to_str().unwrap(),
        "--suite",
        "x32",
        "--n",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("x32.i  FAILS"), "{text}");
    assert!(text.contains("witness (0,1)"), "{text}");
}

#[test]
fn check_lemma_conditions_exit_0_on_set2() {
    let dir = tempfile::tempdir().unwrap();
    let alg = write_algebra(&dir, "set2.json", set2_json());
    let out = relcomm(&[
        "check",
        "--algebra",
        alg.to_str().unwrap(),
        "--cond",
        "x1c.i",
        "--n",
        "2,3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}

#[test]
fn check_unknown_condition_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let alg = write_algebra(&dir, "z2.json", z2_json());
    let out = relcomm(&[
        "check",
        "--algebra",
        alg.to_str().unwrap(),
        "--cond",
        "bogus",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_json_reports_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let alg = write_algebra(&dir, "z2.json", z2_json());
    let out = relcomm(&[
        "check",
        "--algebra",
        alg.to_str().unwrap(),
        "--cond",
        "x32.i",
        "--format",
        "json",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["condition"], "x32.i");
        assert_eq!(v["verdict"], "fails");
        assert!(v["tested"].as_u64().unwrap() >= 2);
        assert_eq!(v["counterexamples"][0]["witness"], serde_json::json!([0, 1]));
        assert_eq!(v["capped"], 0);
    }
}

#[test]
fn commutator_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let full = r#"{"pairs":[[0,0],[0,1],[1,0],[1,1]],"close":"none"}"#;

    let z2 = write_algebra(&dir, "z2.json", z2_json());
    let out = relcomm(&[
        "commutator",
        "--algebra",
        z2.to_str().unwrap(),
        "--rel",
        full,
        "--rel",
        full,
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[R,S|1] = {(0,0), (1,1)}"), "{text}");

    let maj2 = write_algebra(&dir, "maj2.json", maj2_json());
    let out = relcomm(&[
        "commutator",
        "--algebra",
        maj2.to_str().unwrap(),
        "--rel",
        full,
        "--rel",
        full,
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("{(0,0), (0,1), (1,0), (1,1)}"), "{text}");

    let set2 = write_algebra(&dir, "set2.json", set2_json());
    let out = relcomm(&[
        "commutator",
        "--algebra",
        set2.to_str().unwrap(),
        "--rel",
        r#"{"pairs":[[0,1]],"close":"reflexive-compatible"}"#,
        "--rel",
        full,
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[R,S|1] = {(0,0), (1,1)}"), "{text}");
}

#[test]
fn commutator_rejects_incompatible_literal() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = write_algebra(&dir, "z2.json", z2_json());
    let out = relcomm(&[
        "commutator",
        "--algebra",
        z2.to_str().unwrap(),
        "--rel",
        r#"{"pairs":[[0,1]],"close":"none"}"#,
        "--rel",
        r#"{"pairs":[],"close":"none"}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extract_verify_round_trip_on_maj2() {
    let dir = tempfile::tempdir().unwrap();
    let maj2 = write_algebra(&dir, "maj2.json", maj2_json());
    let out = relcomm(&[
        "extract",
        "--algebra",
        maj2.to_str().unwrap(),
        "--scheme",
        "x32",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let chain_text = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&chain_text).unwrap();
    assert_eq!(v["verified"], true);

    let chain_path = dir.path().join("chain.json");
    std::fs::write(&chain_path, &chain_text).unwrap();
    let out = relcomm(&[
        "verify",
        "--algebra",
        maj2.to_str().unwrap(),
        "--scheme",
        "x32",
        "--terms",
        chain_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("all identities hold"), "{text}");
}

#[test]
fn extract_refutation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = write_algebra(&dir, "z2.json", z2_json());
    let out = relcomm(&[
        "extract",
        "--algebra",
        z2.to_str().unwrap(),
        "--scheme",
        "x32",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["refuted"], true);
    assert_eq!(v["condition"], "x32.vi");
}

#[test]
fn verify_wrong_arity_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = write_algebra(&dir, "z2.json", z2_json());
    let terms = dir.path().join("terms.json");
    std::fs::write(&terms, r#"["u"]"#).unwrap();
    let out = relcomm(&[
        "verify",
        "--algebra",
        z2.to_str().unwrap(),
        "--scheme",
        "x32",
        "--terms",
        terms.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_projection_terms_fail_with_assignment() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = write_algebra(&dir, "z2.json", z2_json());
    let terms = dir.path().join("terms.json");
    std::fs::write(&terms, r#"["z"]"#).unwrap();
    let out = relcomm(&[
        "verify",
        "--algebra",
        z2.to_str().unwrap(),
        "--scheme",
        "x32",
        "--terms",
        terms.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL  x = f0(x,y,z,x)"), "{text}");
    assert!(text.contains("[0, 0, 1]"), "{text}");
}

#[test]
fn search_found_and_exhausted() {
    let dir = tempfile::tempdir().unwrap();
    let maj2 = write_algebra(&dir, "maj2.json", maj2_json());
    let out = relcomm(&[
        "search",
        "--algebra",
        maj2.to_str().unwrap(),
        "--scheme",
        "x32",
        "--max-n",
        "4",
        "--max-depth",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let set2 = write_algebra(&dir, "set2.json", set2_json());
    let out = relcomm(&[
        "search",
        "--algebra",
        set2.to_str().unwrap(),
        "--scheme",
        "x32",
        "--max-n",
        "4",
        "--max-depth",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_algebra_file_exits_2() {
    let out = relcomm(&["info", "--algebra", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(2));
}
