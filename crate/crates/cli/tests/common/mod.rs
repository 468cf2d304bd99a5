//! Runs the binary and checks documents against the subset of JSON Schema
//! used in `schemas/`: type, enum, required, properties,
//! additionalProperties = false, items, anyOf, min/maxItems and numeric bounds.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> String {
    crate_dir().join("fixtures").join(name).display().to_string()
}

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magicsim")).args(args).output().expect("binary runs")
}

pub fn run_with_workers(args: &[&str], workers: usize) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magicsim"))
        .args(args)
        .env("MAGICSIM_WORKERS", workers.to_string())
        .output()
        .expect("binary runs")
}

pub fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "exit {:?}, stderr: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

pub fn schema(name: &str) -> Value {
    let path = crate_dir().join("schemas").join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn type_ok(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.is_u64() || v.is_i64(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        other => panic!("schema type {other} not supported"),
    }
}

/// Returns the list of violations, empty when `v` conforms.
pub fn validate(s: &Value, v: &Value) -> Vec<String> {
    let mut errs = Vec::new();
    check(s, v, "$", &mut errs);
    errs
}

pub fn assert_valid(schema_name: &str, v: &Value) {
    let errs = validate(&schema(schema_name), v);
    assert!(errs.is_empty(), "{schema_name}: {errs:#?}");
}

fn check(s: &Value, v: &Value, at: &str, errs: &mut Vec<String>) {
    if let Some(alts) = s.get("anyOf").and_then(Value::as_array) {
        if !alts.iter().any(|a| validate(a, v).is_empty()) {
            errs.push(format!("{at}: matches no alternative"));
        }
        return;
    }
    match s.get("type") {
        Some(Value::String(t)) if !type_ok(t, v) => {
            errs.push(format!("{at}: expected {t}"));
            return;
        }
        Some(Value::Array(ts)) if !ts.iter().any(|t| type_ok(t.as_str().unwrap(), v)) => {
            errs.push(format!("{at}: expected one of {ts:?}"));
            return;
        }
        _ => {}
    }
    if let Some(e) = s.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            errs.push(format!("{at}: {v} not in enum"));
        }
    }
    if let Some(x) = v.as_f64() {
        let bound = |k: &str| s.get(k).and_then(Value::as_f64);
        if bound("minimum").is_some_and(|b| x < b)
            || bound("maximum").is_some_and(|b| x > b)
            || bound("exclusiveMinimum").is_some_and(|b| x <= b)
            || bound("exclusiveMaximum").is_some_and(|b| x >= b)
        {
            errs.push(format!("{at}: {x} out of range"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = s.get("properties").and_then(Value::as_object);
        for r in s.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !obj.contains_key(r.as_str().unwrap()) {
                errs.push(format!("{at}: missing {r}"));
            }
        }
        for (k, val) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(ps) => check(ps, val, &format!("{at}.{k}"), errs),
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errs.push(format!("{at}: unexpected field {k}"))
                }
                None => {}
            }
        }
    }
    if let Some(arr) = v.as_array() {
        let len = arr.len() as u64;
        if s.get("minItems").and_then(Value::as_u64).is_some_and(|m| len < m)
            || s.get("maxItems").and_then(Value::as_u64).is_some_and(|m| len > m)
        {
            errs.push(format!("{at}: length {len} out of range"));
        }
        if let Some(items) = s.get("items") {
            for (i, x) in arr.iter().enumerate() {
                check(items, x, &format!("{at}[{i}]"), errs);
            }
        }
    }
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
