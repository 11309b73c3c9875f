use std::path::PathBuf;
use std::process::Command;

use serde_json::{json, Value};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn menger(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_menger")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json_of(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("stdout is JSON")
}

#[test]
fn theorem2_passes_with_full_u() {
    let (code, out, err) = menger(&["theorem", "2", &fixture("abs1.json"), "--H", "0,1"]);
    assert_eq!(code, 0, "{err}");
    let v = json_of(&out);
    assert_eq!(v["pass"], json!(true));
    assert_eq!(v["artifacts"]["U"], json!([0, 1, 2]));
}

#[test]
fn theorem2_reports_l_unitary_failure() {
    let (code, out, _) = menger(&["theorem", "2", &fixture("abs1.json"), "--H", "1,2"]);
    assert_eq!(code, 1);
    let v = json_of(&out);
    assert_eq!(v["failed"], json!("l-unitary"));
    assert_eq!(v["witness"], json!({ "x": 0, "y": 1 }));
}

#[test]
fn missing_op_entry_is_a_usage_error() {
    let (code, out, err) = menger(&["check", &fixture("nonsense.json")]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("\"0,0\""), "{err}");
}

#[test]
fn unreadable_and_out_of_range_inputs_exit_2() {
    assert_eq!(menger(&["check", &fixture("absent.json")]).0, 2);
    assert_eq!(menger(&["props", &fixture("abs1.json"), "--set", "0,3"]).0, 2);
    assert_eq!(menger(&["props", &fixture("abs1.json"), "--set", "x"]).0, 2);
    assert_eq!(menger(&["frobnicate"]).0, 2);
    assert_eq!(menger(&["theorem", "6", &fixture("abs1.json"), "--H", "0"]).0, 2);
    assert_eq!(menger(&["theorem", "5", &fixture("abs1.json"), "--H", "0"]).0, 2);
    assert_eq!(menger(&["stabilizers", &fixture("abs1.json")]).0, 2);
}

#[test]
fn check_passes_on_fixtures_and_fails_on_a_mutant() {
    for f in ["sys1.json", "sys1_meet.json", "abs1.json", "abs1_meet.json"] {
        assert_eq!(menger(&["check", &fixture(f)]).0, 0, "{f}");
    }
    let text = std::fs::read_to_string(fixture("abs1.json")).unwrap();
    let mut v = json_of(&text);
    v["op"]["0,1"] = json!(2);
    let path = std::env::temp_dir().join(format!("menger-mutant-{}.json", std::process::id()));
    std::fs::write(&path, v.to_string()).unwrap();
    let (code, out, _) = menger(&["check", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 1);
    assert!(json_of(&out)["results"].as_array().unwrap().iter().any(|r| r["status"] != json!("pass")));
}

#[test]
fn labels_address_elements_by_name() {
    let by_index = menger(&["theorem", "2", &fixture("abs1.json"), "--H", "0,1"]);
    let by_label = menger(&["--labels", "theorem", "2", &fixture("abs1.json"), "--H", "id,c0"]);
    assert_eq!(by_index.1, by_label.1);
    assert_eq!(menger(&["--labels", "theorem", "2", &fixture("abs1.json"), "--H", "nope"]).0, 2);
}

#[test]
fn every_theorem_agrees_on_the_fixture() {
    for n in ["1", "2", "3"] {
        assert_eq!(menger(&["theorem", n, &fixture("abs1.json"), "--H", "0,1"]).0, 0, "theorem {n}");
        assert_eq!(menger(&["theorem", n, &fixture("abs1.json"), "--H", "1,2"]).0, 1, "theorem {n}");
    }
    for n in ["4", "5"] {
        assert_eq!(menger(&["theorem", n, &fixture("abs1_meet.json"), "--H", "0,1,3"]).0, 0, "theorem {n}");
        assert_eq!(menger(&["theorem", n, &fixture("abs1_meet.json"), "--H", "1,2"]).0, 1, "theorem {n}");
    }
    assert_eq!(menger(&["theorem", "4", &fixture("abs1.json"), "--H", "0,1"]).0, 2);
}

#[test]
fn audit_lists_every_failure() {
    let (code, out, _) = menger(&["theorem", "2", &fixture("abs1.json"), "--H", "1", "--audit"]);
    assert_eq!(code, 1);
    assert!(!json_of(&out)["failures"].as_array().unwrap().is_empty());
}

#[test]
fn witness_refuses_a_failing_set() {
    let (code, out, _) = menger(&["witness", &fixture("abs1.json"), "--H", "1,2", "--mode", "theorem2"]);
    assert_eq!(code, 1);
    assert_eq!(json_of(&out)["failed"], json!("l-unitary"));
}

#[test]
fn convert_round_trips() {
    for (concrete, abs) in [("sys1.json", "abs1.json"), ("sys1_meet.json", "abs1_meet.json")] {
        let (code, out, _) = menger(&["convert", &fixture(concrete)]);
        assert_eq!(code, 0);
        assert_eq!(out, std::fs::read_to_string(fixture(abs)).unwrap());
        let (code, out, _) = menger(&["convert", &fixture(abs)]);
        assert_eq!(code, 0);
        let path = std::env::temp_dir().join(format!("menger-{}-{abs}", std::process::id()));
        std::fs::write(&path, &out).unwrap();
        let (code, back, _) = menger(&["convert", path.to_str().unwrap()]);
        std::fs::remove_file(&path).ok();
        assert_eq!(code, 0);
        assert_eq!(back, std::fs::read_to_string(fixture(abs)).unwrap());
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["harness", "--carrier", "2", "--arity", "1", "--mode", "exhaustive", "--meet"];
    let first = menger(&args);
    assert_eq!(first.0, 0, "{}", first.2);
    assert_eq!(first, menger(&args));
    let last = first.1.lines().last().unwrap();
    assert!(json_of(last).get("summary").is_some());
}

#[test]
fn harness_writes_to_a_file() {
    let path = std::env::temp_dir().join(format!("menger-harness-{}.jsonl", std::process::id()));
    let (code, out, _) = menger(&[
        "harness",
        "--carrier",
        "2",
        "--arity",
        "1",
        "--mode",
        "random",
        "--seed",
        "3",
        "--samples",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(json_of(text.lines().last().unwrap())["summary"]["instances"], json!(4));
}
