use std::process::{Command, Output};

use serde_json::Value;

fn towercf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_towercf"))
        .args(args)
        .env_remove("TOWERCF_MAX_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn expand_level_one_is_classical() {
    let o = towercf(&["expand", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1; 2\u{304}"), "{}", stdout(&o));
}

#[test]
fn expand_level_two_shows_period() {
    let o = towercf(&["expand", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("overline(2*X1 - 2, 2)"));
}

#[test]
fn expand_rejects_level_zero() {
    assert_eq!(towercf(&["expand", "--n", "0"]).status.code(), Some(2));
    assert_eq!(towercf(&["expand", "--n", "11"]).status.code(), Some(2));
}

#[test]
fn tie_surfaces_with_step() {
    let o = towercf(&["expand", "--n", "2", "--alpha", "X1 + 1/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at step 0"));
}

#[test]
fn bad_alpha_is_usage_error() {
    let o = towercf(&["expand", "--n", "2", "--alpha", "X7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pell_suite_json() {
    let o = towercf(&["verify", "--suite", "pell", "--max-level", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "verify-pell");
    assert_eq!(v["overall"], "pass");
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    for c in checks {
        assert_eq!(c["verdict"], "pass");
        assert!(c["paper_anchor"].is_string());
        assert!(c["elapsed_ms"].is_u64());
    }
    assert_eq!(v["config"]["max_level"], 3);
}

#[test]
fn products_alias_runs() {
    let o = towercf(&["verify-products", "--max-level", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("overall: pass"));
}

#[test]
fn invalid_config_is_usage_error() {
    assert_eq!(towercf(&["verify", "--max-level", "0"]).status.code(), Some(2));
    assert_eq!(towercf(&["verify", "--max-level", "99"]).status.code(), Some(2));
    assert_eq!(towercf(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(towercf(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn max_bits_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_towercf"))
        .args(["verify", "--suite", "pell", "--max-level", "2", "--precision", "512"])
        .env("TOWERCF_MAX_BITS", "256")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_written_to_file() {
    let path = std::env::temp_dir().join(format!("towercf-report-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let o = towercf(&["verify-pell", "--max-level", "2", "--format", "json", "--output", p]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["overall"], "pass");
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
}
