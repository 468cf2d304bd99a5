mod common;

use common::*;
use serde_json::Value;

fn stderr_diag(out: &std::process::Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("diagnostic on stderr");
    let v: Value = serde_json::from_str(line).expect("diagnostic is JSON");
    assert_valid("error", &v);
    v
}

#[test]
fn fixtures_match_input_schema() {
    for entry in std::fs::read_dir(crate_dir().join("fixtures")).unwrap() {
        let path = entry.unwrap().path();
        let errs = validate(&schema("input"), &read_json(&path));
        assert!(errs.is_empty(), "{}: {errs:#?}", path.display());
    }
}

#[test]
fn schema_checker_rejects_bad_documents() {
    let s = schema("estimate");
    assert!(!validate(&s, &serde_json::json!({"mu_hat": 0.5})).is_empty());
    let mut ok = stdout_json(&run(&["estimate", "--input", &fixture("h_identity_z.json"), "--epsilon", "0.1"]));
    assert!(validate(&s, &ok).is_empty());
    ok["extra"] = Value::Bool(true);
    assert!(!validate(&s, &ok).is_empty());
}

#[test]
fn estimate_h_state_projector() {
    let v = stdout_json(&run(&["estimate", "--input", &fixture("h_identity_z.json")]));
    assert_valid("estimate", &v);
    let mu = v["mu_hat"].as_f64().unwrap();
    let exact = (2.0 + 2f64.sqrt()) / 4.0;
    assert!((mu - exact).abs() < 0.02, "mu_hat {mu}");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["epsilon"], 0.02);
}

#[test]
fn estimate_flags_override_params() {
    let v = stdout_json(&run(&["estimate", "--input", &fixture("h_identity_z.json"), "--seed", "9", "--epsilon", "0.1"]));
    assert_eq!(v["seed"], 9);
    assert_eq!(v["epsilon"], 0.1);
}

#[test]
fn t_gadget_rotates_plus_state() {
    let v = stdout_json(&run(&["estimate", "--input", &fixture("t_gadget.json")]));
    let mu = v["mu_hat"].as_f64().unwrap();
    assert!((mu - 0.5f64.sqrt()).abs() < 0.05, "mu_hat {mu}");
}

#[test]
fn output_is_identical_across_runs_and_workers() {
    let args = ["estimate", "--input", &fixture("noisy_h_pair.json")];
    let a = run_with_workers(&args, 1);
    let b = run_with_workers(&args, 3);
    let c = run_with_workers(&args, 3);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);

    let args = ["constrained", "--input", &fixture("noisy_h_pair.json")];
    assert_eq!(run_with_workers(&args, 1).stdout, run_with_workers(&args, 2).stdout);
}

#[test]
fn sample_is_reproducible_and_valid() {
    let args = ["sample", "--input", &fixture("sample_h_pair.json"), "--samples", "6"];
    let a = run_with_workers(&args, 1);
    let b = run_with_workers(&args, 2);
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_valid("sample", &v);
    let strings = v["strings"].as_array().unwrap();
    assert_eq!(strings.len(), 6);
    assert!(strings.iter().all(|s| s.as_str().unwrap().len() == 2));
    assert_eq!(v["report"]["k_min"], v["report"]["k_max"]);
}

#[test]
fn sample_csv_has_one_row_per_string() {
    let out = run(&["sample", "--input", &fixture("sample_h_pair.json"), "--samples", "3", "--format", "csv", "--w", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,bits,k");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(1).unwrap().len() == 1));
}

#[test]
fn constrained_interval_contains_exact_value() {
    let v = stdout_json(&run(&["constrained", "--input", &fixture("noisy_h_pair.json")]));
    assert_valid("constrained", &v);
    // CX maps ZZ to Z on the target; depolarizing with probability 0.8 keeps 0.2 of it.
    let exact = 0.2 * 0.9 * 0.5f64.sqrt();
    let (lo, hi) = (v["E_min"].as_f64().unwrap(), v["E_max"].as_f64().unwrap());
    assert!(lo <= exact && exact <= hi, "[{lo}, {hi}] misses {exact}");
    let e = v["E_hat"].as_f64().unwrap();
    let d = v["Delta"].as_f64().unwrap();
    assert!(((hi + lo) / 2.0 - e).abs() < 1e-12 && ((hi - lo) / 2.0 - d).abs() < 1e-12);
}

#[test]
fn monotone_of_ten_h_copies() {
    let out = run(&["monotone", "--state", "H", "--copies", "10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()].parse::<f64>().unwrap();
    assert!((col("log2_lambda") - 2.28443).abs() < 5e-5);
    assert!((col("log2_stab_norm") - 2.71553).abs() < 5e-5);

    let v = stdout_json(&run(&["monotone", "--state", "F", "--copies", "1", "--format", "json"]));
    assert_valid("monotone", &v);
    assert!((v["robustness"].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-7);
}

#[test]
fn distill_rows_and_schema() {
    let v = stdout_json(&run(&["distill", "--alpha", "0.8,0.9,1", "--m", "1,4", "--eps-log=-12:-2:3", "--format", "json"]));
    assert_valid("distill", &v);
    assert_eq!(v["rows"].as_array().unwrap().len(), 18);
    let out = run(&["distill", "--target", "F", "--alpha", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("target,alpha,m,epsilon,p,lambda_plus,k1,k2,k,rate_bound\n"));
    let rate: f64 = text.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!((rate - 0.6670).abs() < 5e-5, "rate {rate}");
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest", "--samples", "40"]);
    let v = stdout_json(&out);
    assert_valid("selftest", &v);
    assert_eq!(v["passed"], true);
}

#[test]
fn bench_reports_every_kernel() {
    let v = stdout_json(&run(&["bench", "--qubits", "1", "--samples", "200"]));
    assert_valid("bench", &v);
    assert_eq!(v.as_array().unwrap().len(), 4);
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("magicsim-out-{}.json", std::process::id()));
    let out = run(&["monotone", "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_valid("monotone", &read_json(&path));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn unknown_input_field_is_a_validation_error() {
    let path = std::env::temp_dir().join(format!("magicsim-bad-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"state": {"product": ["H"]}, "measurement": {"pauli": "+Z"}, "colour": 1}"#).unwrap();
    let out = run(&["estimate", "--input", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(2));
    let d = stderr_diag(&out);
    assert_eq!(d["kind"], "validation");
    assert!(d["message"].as_str().unwrap().contains("colour"));
}

#[test]
fn bad_parameters_exit_with_code_two() {
    let cases: &[&[&str]] = &[
        &["estimate", "--input", &fixture("h_identity_z.json"), "--pfail", "1.5"],
        &["estimate", "--input", &fixture("h_identity_z.json"), "--epsilon", "-1"],
        &["constrained", "--input", &fixture("noisy_h_pair.json"), "--c", "2"],
        &["monotone", "--state", "Q"],
        &["monotone", "--bloch", "1,1,1"],
        &["distill", "--alpha", "0.5"],
        &["distill", "--target", "Z"],
        &["sample", "--input", &fixture("h_identity_z.json"), "--delta", "0"],
        &["estimate", "--bogus"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stderr_diag(&out)["kind"], "validation");
    }
}

#[test]
fn missing_input_file_is_an_io_error() {
    let out = run(&["estimate", "--input", "/nonexistent/run.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_diag(&out)["kind"], "io");
}

#[test]
fn help_exits_zero() {
    assert!(run(&["--help"]).status.success());
    assert!(run(&["sample", "--help"]).status.success());
}
