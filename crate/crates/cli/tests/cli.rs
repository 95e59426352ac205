use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const B23: &str = r#"{"kind":"bernoulli","p":2,"value_prime":3,"weights":["-2","3"]}"#;
const B35: &str = r#"{"kind":"bernoulli","p":3,"value_prime":5,"weights":["-2","-2","5"]}"#;
const HALF: &str = r#"{"kind":"bernoulli","p":2,"value_prime":3,"weights":["1/2","1/2"]}"#;

fn nadyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nadyn")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn ok(args: &[&str]) -> String {
    let out = nadyn(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).expect("json output")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cylinder_norm_from_spec_file() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bern_p2_l3.json", B23);
    let norm = json(&["measure", "norm", "--spec", s(&spec), "--set", "U:11"]);
    assert_eq!(norm, serde_json::json!({"prime": 3, "exponent": 2}));
}

#[test]
fn measure_eval_and_point_norms() {
    let v = json(&["measure", "eval", "--spec", B23, "--set", "U:1 + U:00"]);
    assert_eq!(v["measure"], "7");
    assert_eq!(json(&["measure", "nmu", "--spec", B23, "--point", "1:0"])["exponent"], 1);
    assert_eq!(json(&["measure", "nmu", "--spec", B23, "--point", ":0"])["exponent"], 0);
    assert_eq!(json(&["measure", "nmu", "--spec", B23, "--point", ":01"]), serde_json::json!({"zero": true}));
}

#[test]
fn counting_measures_take_label_sets() {
    let spec = r#"{"kind":"counting","labels":["a","b","c"],"h":["0","5","3"],"value_prime":5}"#;
    assert_eq!(json(&["measure", "eval", "--spec", spec, "--set", "b,c"])["measure"], "8");
    assert_eq!(json(&["measure", "norm", "--spec", spec, "--set", "a"]), serde_json::json!({"zero": true}));
    assert_eq!(json(&["measure", "nmu", "--spec", spec, "--point", "b"])["exponent"], 1);
    assert_eq!(nadyn(&["measure", "nmu", "--spec", spec, "--point", "z"]).status.code(), Some(2));
}

#[test]
fn verify_prints_its_seed_and_passes() {
    let v = json(&["measure", "verify", "--spec", B35, "--depth", "3", "--seed", "7"]);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["passed"], true);
}

#[test]
fn measure_entropy_csv_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bern_p3_l5.json", B35);
    let out = ok(&[
        "entropy",
        "measure",
        "--spec",
        s(&spec),
        "--partition",
        "U:0|U:1|U:2",
        "--transform",
        "shift",
        "--n",
        "6",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,e_n,M_n,a_n_decimal,ratio");
    assert_eq!(lines.len(), 8);
    for (n, line) in lines[1..7].iter().enumerate() {
        let n = n as u32 + 1;
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], n.to_string());
        assert_eq!(cols[2], 3u64.pow(n).to_string());
    }
    assert!(lines[1].starts_with("1,1,3,0.3169925001442312362907477887895633017519628815385,"));
    assert!(lines[2].starts_with("2,2,9,0.1267970000576924945162991155158253207007851526154,"));
    let summary: Value = serde_json::from_str(lines[7]).unwrap();
    assert_eq!(summary["classification"], "extrapolated-zero");
    assert!(summary["upper"].is_string());
}

#[test]
fn topological_entropy_of_coarse_cover_is_exact() {
    let out = ok(&["entropy", "top", "--p", "3", "--cover", "U:0|U:1+U:2", "--transform", "shift", "--n", "5"]);
    let summary: Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    assert_eq!(summary["classification"], "exact");
    assert_eq!(summary["limit"], "1");
}

#[test]
fn compare_reports_the_unit_norm_case() {
    let spec = r#"{"kind":"bernoulli","p":2,"value_prime":5,"weights":["-2","3"]}"#;
    let v = json(&[
        "entropy",
        "compare",
        "--spec",
        spec,
        "--partition",
        "U:0|U:1",
        "--transform",
        "shift",
        "--n",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["summary"]["unit_norm"], true);
    assert_eq!(v["summary"]["measure"]["limit"], "1");
    assert_eq!(v["summary"]["topological"]["limit"], "1");
}

#[test]
fn invalid_partition_is_a_usage_error_with_witness() {
    let out = nadyn(&[
        "entropy",
        "measure",
        "--spec",
        B23,
        "--partition",
        "U:0|U:01|U:1",
        "--transform",
        "shift",
        "--n",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("overlap"));
}

#[test]
fn pathology_table_ends_with_verdict() {
    let out = ok(&["pathology", "upsilon", "--p", "2", "--digits", ",period=01", "--n", "10"]);
    assert_eq!(out, "n,k_n,abs\n2,1,2^-1\n4,3,2^-3\n6,5,2^-5\n8,7,2^-7\n10,9,2^-9\ncontinuity violated: yes\n");
    let out = ok(&["pathology", "upsilon", "--p", "3", "--digits", "period=012", "--n", "6"]);
    assert!(out.contains("\n3,2,3^-2\n"), "{out}");
}

#[test]
fn swap_conjugacy_round_trip() {
    let dir = TempDir::new().unwrap();
    let iso = dir.path().join("iso.json");
    ok(&["dynamics", "iso-from-perm", "--p", "2", "--pi", "1,0", "--depth", "5", "--output", s(&iso)]);
    let v = json(&["dynamics", "check-conjugacy", "--iso", s(&iso), "--transform", "shift", "--depth", "4"]);
    assert_eq!(v["passed"], true);
    let v = json(&["dynamics", "point-map", "--iso", s(&iso), "--spec", HALF, "--point", "0110:1", "--depth", "4"]);
    assert_eq!(v["prefix"], "1001");
    let v = json(&["dynamics", "check-iso", "--phi", "swap", "--transform", "shift", "--spec", HALF]);
    assert_eq!(v["passed"], true);
}

#[test]
fn spectral_check_extracts_the_swap() {
    let dir = TempDir::new().unwrap();
    let w = dir.path().join("w.json");
    ok(&["dynamics", "composition-operator", "--p", "2", "--phi", "swap", "--depth", "3", "-o", s(&w)]);
    let v = json(&["spectral-check", "--W", s(&w), "--spec", HALF]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["iso"]["images"][1]["0"], "U:1");

    let doubled = fs::read_to_string(&w).unwrap().replace("\"1\"", "\"2\"");
    let bad = write(&dir, "bad.json", &doubled);
    let out = nadyn(&["spectral-check", "--W", s(&bad), "--spec", HALF]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["iso"], Value::Null);
}

#[test]
fn non_preserving_transformation_exits_one_with_witnesses() {
    let out = nadyn(&["dynamics", "check-preserving", "--spec", B23, "--transform", "odometer", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mu(T^-1 A)"));
    let out = nadyn(&["dynamics", "check-preserving", "--spec", B23, "--transform", "shift", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn integrate_and_step_norm() {
    let f = r#"{"terms":[{"coeff":"2","set":"U:0"},{"coeff":"1/3","set":"U:11"}]}"#;
    assert_eq!(json(&["integrate", "--spec", B23, "--fn", f])["integral"], "-1");
    assert_eq!(json(&["stepnorm", "--spec", B23, "--fn", f]), serde_json::json!({"prime": 3, "exponent": 0}));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(nadyn(&["measure", "norm", "--spec", B23]).status.code(), Some(2));
    assert_eq!(nadyn(&["measure", "norm", "--spec", B23, "--set", "U:2"]).status.code(), Some(2));
    assert_eq!(nadyn(&["measure", "norm", "--spec", "/nonexistent.json", "--set", "U:0"]).status.code(), Some(2));
    assert_eq!(nadyn(&["measure", "verify", "--spec", B23, "--depth", "15"]).status.code(), Some(2));
    assert_eq!(nadyn(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["measure", "verify", "--spec", B23, "--depth", "4"];
    assert_eq!(ok(&args), ok(&args));
    let args = ["entropy", "measure", "--spec", B35, "--partition", "U:0|U:1+U:2", "--transform", "shift", "--n", "4"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn emitted_json_reloads() {
    let dir = TempDir::new().unwrap();
    let w = dir.path().join("w.json");
    ok(&["dynamics", "composition-operator", "--p", "3", "--phi", "perm:2,0,1", "--depth", "2", "-o", s(&w)]);
    let haar = r#"{"kind":"haar","p":3,"value_prime":2}"#;
    let v = json(&["spectral-check", "--W", s(&w), "--spec", haar]);
    let iso = write(&dir, "iso.json", &serde_json::to_string(&v["iso"]).unwrap());
    let v = json(&["dynamics", "check-conjugacy", "--iso", s(&iso), "--transform", "shift", "--depth", "1"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn selftest_single_criterion() {
    let out = ok(&["selftest", "--criterion", "1"]);
    assert!(out.starts_with("seed: "));
    assert!(out.contains("[PASS] cylinder norm formula"));
}
