use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const FIXTURE: &str = "1 - t1^-1*t2 + t1^-2*t2^2 + t1^-2*t2*t3 + t1^-2*t2*t4";

fn permuchi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permuchi"))
        .args(args)
        .env_remove("PERMUCHI_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = permuchi(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let value: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&value).expect("schema compiles")
}

fn assert_valid(schema_name: &str, doc: &str) {
    let s = schema(schema_name);
    let v: Value = serde_json::from_str(doc).unwrap();
    let msgs: Vec<String> = match s.validate(&v) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| e.to_string()).collect(),
    };
    assert!(msgs.is_empty(), "{schema_name}: {msgs:?}");
}

fn temp_path(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("permuchi-{tag}-{}.json", std::process::id()))
}

#[test]
fn compute_fixture_with_each_method() {
    for method in ["lattice", "localization", "recursion", "all"] {
        let out = ok(&["compute", "--n", "3", "--a", "2", "--i", "1", "--j", "2", "--method", method]);
        assert_eq!(out.trim_end(), FIXTURE, "{method}");
    }
}

#[test]
fn compute_trivial_and_json() {
    assert_eq!(ok(&["compute", "--n", "2", "--a", "0", "--i", "1", "--j", "2", "--method", "all"]).trim(), "1");

    let out = ok(&["compute", "--n", "3", "--a", "2", "--i", "1", "--j", "2", "--format", "json"]);
    assert_valid("chi.schema.json", &out);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["eval_at_ones"], 3);
    assert_eq!(v["method"], "all");
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 5);
    assert!(terms.iter().any(|t| t["exp"] == serde_json::json!([-2, 1, 1, 0]) && t["c"] == 1));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["n", "a", "i", "j", "method", "terms", "eval_at_ones"]);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["compute", "--n", "3", "--a", "5", "--i", "1", "--j", "2"][..],
        &["compute", "--n", "3", "--a", "1", "--i", "0", "--j", "2"],
        &["compute", "--n", "3", "--a", "1", "--i", "1", "--j", "5"],
        &["compute", "--n", "3", "--a", "1"],
        &["compute", "--n", "3", "--a", "1", "--i", "1", "--j", "2", "--method", "magic"],
        &["general", "--n", "2", "--a", "3"],
        &["table"],
        &["compute", "--n", "3", "--a", "1", "--i", "1", "--j", "2", "--workers", "0"],
        &["frobnicate"],
    ] {
        assert_eq!(permuchi(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn method_limits_are_reported() {
    // localization stops at dimension 9
    let out = permuchi(&["compute", "--n", "10", "--a", "1", "--i", "1", "--j", "2", "--method", "localization"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("maximum"));
}

#[test]
fn general_examples() {
    assert_eq!(ok(&["general", "--n", "3", "--a", "2"]).trim(), "t1 + t2 + t3 + t4 - 1");
    assert_eq!(ok(&["general", "--n", "1", "--a", "1"]).trim(), "1");
    assert_eq!(ok(&["general", "--n", "0", "--a", "0"]).trim(), "1");
    let out = ok(&["general", "--n", "3", "--a", "2", "--format", "json"]);
    assert_valid("chi.schema.json", &out);
}

#[test]
fn verify_passes_and_reports() {
    let out = ok(&["verify", "--max-n", "3"]);
    assert!(out.trim_end().ends_with(" 0 failed"), "{out}");

    let out = ok(&["verify", "--max-n", "4", "--format", "json"]);
    assert_valid("verify.schema.json", &out);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(v["cases"].as_array().unwrap().len(), 225);
}

#[test]
fn verify_fails_on_injected_fault() {
    let out = permuchi(&["verify", "--max-n", "2", "--inject-fault", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn table_rows() {
    let out = ok(&["table", "--n", "1"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 9);
    assert!(lines[1..].iter().all(|l| l.ends_with("  1")));

    let out = ok(&["table", "--n", "0", "--format", "json"]);
    assert_valid("table.schema.json", &out);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["terms"], serde_json::json!([{"exp": [0], "c": 1}]));

    let out = ok(&["table", "--n", "3", "--method", "recursion", "--format", "json"]);
    assert_valid("table.schema.json", &out);
    let rows: Vec<Value> = serde_json::from_str(&out).unwrap();
    assert_eq!(rows.len(), 64);
    let keys: Vec<(u64, u64, u64)> = rows
        .iter()
        .map(|r| (r["a"].as_u64().unwrap(), r["i"].as_u64().unwrap(), r["j"].as_u64().unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let row = rows.iter().find(|r| r["a"] == 2 && r["i"] == 1 && r["j"] == 2).unwrap();
    let text = ok(&["compute", "--n", "3", "--a", "2", "--i", "1", "--j", "2", "--format", "json"]);
    let single: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(row["terms"], single["terms"]);
}

#[test]
fn output_is_deterministic() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["compute", "--n", "4", "--a", "2", "--i", "3", "--j", "1", "--format", "json"],
        vec!["table", "--n", "3"],
        vec!["general", "--n", "4", "--a", "2"],
        vec!["verify", "--max-n", "3", "--format", "json"],
    ];
    for args in runs {
        let reference = ok(&args);
        for workers in ["1", "2", "8"] {
            let mut with = args.clone();
            with.extend(["--workers", workers]);
            assert_eq!(ok(&with), reference, "{with:?}");
        }
        assert_eq!(ok(&args), reference);
    }
}

#[test]
fn memo_cache_round_trip() {
    let path = temp_path("cache");
    let _ = std::fs::remove_file(&path);
    let p = path.to_str().unwrap();
    let args = ["compute", "--n", "4", "--a", "2", "--i", "1", "--j", "3", "--method", "recursion", "--cache", p];
    let cold = ok(&args);
    let saved = std::fs::read_to_string(&path).unwrap();
    let v: Value = serde_json::from_str(&saved).unwrap();
    assert_eq!(v["version"], 1);
    assert!(!v["entries"].as_array().unwrap().is_empty());
    assert_eq!(ok(&args), cold);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), saved);

    // the environment variable wins over the flag
    let env_path = temp_path("env-cache");
    std::fs::write(&env_path, "{\"version\":7,\"entries\":[]}").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_permuchi"))
        .args(args)
        .env("PERMUCHI_CACHE", &env_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));

    let _ = std::fs::remove_file(&path);
    let _ = std::fs::remove_file(&env_path);
}
