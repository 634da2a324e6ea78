use std::path::Path;
use std::process::{Command, Output};

fn nrpuf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrpuf")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL_METRICS: &str = r#"{
  "kind": "metrics",
  "master_seed": 5,
  "puf": {"rows": 32, "cols": 32, "dummy_rows": 8, "dummy_cols": 8},
  "counts": {"instances": 4, "challenges": 6, "trials": 2, "response_bits": 16},
  "sac": {"worst_case_sets": 2}
}"#;

#[test]
fn crp_count_prints_values() {
    let out = nrpuf(&["crp-count", "--n", "128", "--m", "128", "--cs", "5", "--formula", "eq5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "2150395699200");
    let out = nrpuf(&["crp-count", "--n", "128", "--m", "128", "--cs", "5", "--formula", "table1-floor"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "25804748390400");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out_dir = out_dir.to_str().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind": "metrics", "master_seed": 1, "counts": {"instances": 0}}"#);
    let garbage = write(dir.path(), "garbage.json", "{");
    let unknown = write(dir.path(), "unknown.json", r#"{"kind": "metrics", "master_seed": 1, "typo": 1}"#);
    for cfg in [bad.as_str(), garbage.as_str(), unknown.as_str(), "/nonexistent/config.json"] {
        let out = nrpuf(&["run", "--config", cfg, "--out", out_dir]);
        assert_eq!(out.status.code(), Some(2), "{cfg}");
    }
    let ok = write(dir.path(), "ok.json", SMALL_METRICS);
    assert_eq!(nrpuf(&["run", "--config", &ok, "--out", out_dir, "--workers", "0"]).status.code(), Some(2));
    assert_eq!(nrpuf(&["crp-count", "--n", "4", "--m", "4", "--cs", "6"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = nrpuf(&["eval", "--instance", missing.to_str().unwrap(), "--challenge", "1"]);
    assert_eq!(out.status.code(), Some(3));

    let inst = dir.path().join("puf.json");
    let inst = inst.to_str().unwrap();
    let cfg = write(dir.path(), "puf_cfg.json", r#"{"rows": 16, "cols": 16, "dummy_rows": 4, "dummy_cols": 4}"#);
    assert!(nrpuf(&["save-instance", "--config", &cfg, "--seed", "1", "--out", inst]).status.success());
    let text = std::fs::read_to_string(inst).unwrap();
    std::fs::write(inst, &text[..text.len() - 10]).unwrap();
    assert_eq!(nrpuf(&["eval", "--instance", inst, "--challenge", "1"]).status.code(), Some(3));
}

#[test]
fn run_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL_METRICS);
    let json_dir = dir.path().join("json");
    let out = nrpuf(&["run", "--config", &cfg, "--out", json_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(json_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["kind"], "metrics");
    assert_eq!(report["config"]["master_seed"], 5);
    assert!(report["scalars"]["uniqueness_mean"].is_f64());

    let csv_dir = dir.path().join("csv");
    let out = nrpuf(&["run", "--config", &cfg, "--out", csv_dir.to_str().unwrap(), "--format", "csv", "--seed", "6"]);
    assert!(out.status.success());
    let scalars = std::fs::read_to_string(csv_dir.join("scalars.csv")).unwrap();
    assert!(scalars.starts_with("name,value\n"));
    assert!(scalars.contains("uniformity_mean,"));
    let echoed = std::fs::read_to_string(csv_dir.join("config.json")).unwrap();
    assert!(echoed.contains("\"master_seed\": 6"));
    assert!(csv_dir.join("distributions.csv").exists());
}

#[test]
fn eval_is_reproducible_and_validates_challenges() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("puf.json");
    let inst = inst.to_str().unwrap();
    assert!(nrpuf(&["save-instance", "--seed", "3", "--out", inst]).status.success());
    let args = ["eval", "--instance", inst, "--seed", "4", "--challenge", "0x1", "ff", "deadbeefdeadbeef"];
    let first = nrpuf(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, nrpuf(&args).stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("0000000000000001 "));
    assert!(lines[2].starts_with("deadbeefdeadbeef "));

    let bad = nrpuf(&["eval", "--instance", inst, "--challenge", "xyz"]);
    assert_eq!(bad.status.code(), Some(2));
    let long = nrpuf(&["eval", "--instance", inst, "--challenge", "11112222333344445"]);
    assert_eq!(long.status.code(), Some(2));
}
