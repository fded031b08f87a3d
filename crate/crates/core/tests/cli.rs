//! The binary end to end: exit codes, report shape, cache behaviour.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("padic-lab-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn lab(args: &[&str], cache: &Path) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_padic-lab"))
        .args(args)
        .arg("--cache-dir")
        .arg(cache)
        .arg("--quiet")
        .env_remove("PADIC_LAB_CACHE_DIR")
        .env_remove("PADIC_LAB_PREC")
        .env_remove("PADIC_LAB_THREADS")
        .output()
        .unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report)
}

fn schema_required() -> Vec<String> {
    let s: Value = serde_json::from_str(include_str!("../schema/report.schema.json")).unwrap();
    s["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| k.as_str().unwrap().to_string())
        .collect()
}

fn well_formed(r: &Value, command: &str) {
    for key in schema_required() {
        assert!(r.get(&key).is_some(), "missing {key} in {r}");
    }
    assert_eq!(r["schema"], "padic-lab-report");
    assert_eq!(r["command"], command);
    for c in r["checks"].as_array().unwrap() {
        assert!(c["name"].is_string() && c["pass"].is_boolean());
    }
}

#[test]
fn irregular_lab_exits_zero() {
    let dir = scratch("irr");
    let (code, r) = lab(&["irregular-lab", "--p", "5", "--k", "3"], &dir);
    assert_eq!(code, 0, "{r}");
    well_formed(&r, "irregular-lab");
    assert_eq!(r["checks"].as_array().unwrap().len(), 12);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn lfun_table_at_thirty_three() {
    let dir = scratch("lfun");
    let (code, r) = lab(
        &["lfun", "--N", "33", "--p", "3", "--k", "0", "--prec", "8"],
        &dir,
    );
    assert_eq!(code, 0, "{r}");
    well_formed(&r, "lfun");
    let rows = r["data"]["rows"].as_array().unwrap();
    let verified = rows
        .iter()
        .filter(|x| x["verified"] == true && x["kind"] != "vanishing")
        .count();
    assert!(verified >= 4, "{verified} verified rows");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn lfun_without_enough_precision_exits_three() {
    let dir = scratch("prec");
    let (code, r) = lab(&["lfun", "--N", "33", "--p", "3", "--prec", "1"], &dir);
    assert_eq!(code, 3, "{r}");
    assert_eq!(r["status"], "precision_exhausted");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn quick_selftest_exits_zero() {
    let dir = scratch("self");
    let (code, r) = lab(&["selftest", "--quick"], &dir);
    assert_eq!(code, 0, "{r}");
    well_formed(&r, "selftest");
    assert_eq!(r["checks"].as_array().unwrap().len(), 4);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn config_errors_exit_two() {
    let dir = scratch("cfg");
    for bad in [
        &["space", "--N", "0"][..],
        &["lfun", "--N", "34"],
        &["lift", "--N", "33", "--p", "9"],
    ] {
        let (code, r) = lab(bad, &dir);
        assert_eq!(code, 2, "{bad:?}: {r}");
        assert_eq!(r["status"], "config_error");
    }
    let file = dir.join("bad.json");
    std::fs::write(&file, r#"{"p": 4}"#).unwrap();
    let (code, _) = lab(&["space", "--config", file.to_str().unwrap()], &dir);
    assert_eq!(code, 2);
    std::fs::write(&file, r#"{"prime": 5}"#).unwrap();
    let (code, _) = lab(&["space", "--config", file.to_str().unwrap()], &dir);
    assert_eq!(code, 2);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn cache_is_reused_and_tampering_is_caught() {
    let dir = scratch("cache");
    let args = ["hecke", "--N", "11", "--op", "T2"];
    let (code, first) = lab(&args, &dir);
    assert_eq!(code, 0, "{first}");
    assert_eq!(first["data"]["source"], "computed");
    let (code, second) = lab(&args, &dir);
    assert_eq!(code, 0);
    assert_eq!(second["data"]["source"], "cached");
    assert_eq!(first["data"]["matrix"], second["data"]["matrix"]);

    let path = dir.join("hecke_N11_k0_trivial_plus_T2.json");
    let mut entry: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    entry["entries"][0][0] = Value::String("5".into());
    std::fs::write(&path, entry.to_string()).unwrap();
    let (code, r) = lab(&args, &dir);
    assert_eq!(code, 1, "{r}");
    assert_eq!(r["status"], "check_failure");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn report_file_matches_stdout() {
    let dir = scratch("out");
    let file = dir.join("r.json");
    let (_, stdout) = lab(&["evalpair"], &dir);
    let (code, none) = lab(&["evalpair", "--report", file.to_str().unwrap()], &dir);
    assert_eq!(code, 0);
    assert_eq!(none, Value::Null);
    let mut written: Value =
        serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    written["config"]["report"] = Value::Null;
    assert_eq!(written, stdout);
    std::fs::remove_dir_all(dir).unwrap();
}
