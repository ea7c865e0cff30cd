use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn embedlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embedlab"))
        .current_dir(dir)
        .args(args)
        .env_remove("EMBEDLAB_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gen_writes_stage_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let o = embedlab(dir.path(), &["gen", "--family", "omega_k", "--k", "2", "--stages", "5", "--out", "w.txt"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("w.txt")).unwrap();
    assert_eq!(text.matches("-- stage").count(), 5);
    assert!(text.contains("lt 0 1"));

    let again = embedlab(dir.path(), &["gen", "--family", "omega_k", "--k", "2", "--stages", "5"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["gen", "--family", "omega_k", "--k", "0", "--stages", "5"][..],
        &["gen", "--family", "nonsense", "--stages", "5"],
        &["run", "--op", "nope", "--spec", "omega/fair/5"],
        &["suite", "--only", "42"],
    ] {
        assert_eq!(embedlab(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn signature_mismatch_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = embedlab(dir.path(), &["run", "--op", "replicate:2", "--spec", "e/fair/10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("signature"));
}

#[test]
fn force_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.txt"), "# two points\nlt 0 1\n").unwrap();
    // copy 0 of 0 and of 1 are 0 and 2
    let verdict = |atom: &str| -> Value {
        let o = embedlab(dir.path(), &["force", "--op", "replicate:2", "--alpha", "a.txt", "--atom", atom]);
        assert!(o.status.success());
        serde_json::from_str(stdout(&o).trim()).unwrap()
    };
    assert_eq!(verdict("lt 0 2")["verdict"]["outcome"], "FORCED");
    let refuted = verdict("lt 2 0");
    assert_eq!(refuted["verdict"]["outcome"], "REFUTED");
    assert!(refuted["verdict"]["certificate"].is_array());
}

#[test]
fn force_scan_on_replicate() {
    let dir = tempfile::tempdir().unwrap();
    let o = embedlab(dir.path(), &["force", "--op", "replicate:1", "--scan", "trichotomy", "--max-alpha", "3", "--ext", "2"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["report"]["violations"].as_array().map(Vec::len), Some(0), "{v}");
}

#[test]
fn run_then_classify() {
    let dir = tempfile::tempdir().unwrap();
    let o = embedlab(dir.path(), &["run", "--op", "replicate:2", "--spec", "omega_k:1/fair/60", "--log", "r.jsonl"]);
    assert!(o.status.success());
    let log = std::fs::read_to_string(dir.path().join("r.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 60);

    let ok = embedlab(dir.path(), &["classify", "--log", "r.jsonl", "--claim", "omega_k:2"]);
    let v: Value = serde_json::from_str(stdout(&ok).trim()).unwrap();
    assert_eq!(v["verdict"]["verdict"], "CONSISTENT");
    assert_eq!(v["fingerprint"]["pred_unstable_count"], 1);

    let bad = embedlab(dir.path(), &["classify", "--log", "r.jsonl", "--claim", "omega_star_k:2"]);
    let v: Value = serde_json::from_str(stdout(&bad).trim()).unwrap();
    assert_eq!(v["verdict"]["verdict"], "INCONSISTENT");
    assert!(!v["verdict"]["witness"].is_null());
}

#[test]
fn suite_subset_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let o = embedlab(dir.path(), &["suite", "--only", "5,6", "--seed", "3", "--out", "s"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("s/suite.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(stdout(&o).contains("phi_pair stabilization"));

    let env = Command::new(env!("CARGO_BIN_EXE_embedlab"))
        .current_dir(dir.path())
        .args(["suite", "--only", "5,6", "--seed", "99", "--out", "t"])
        .env("EMBEDLAB_SEED", "3")
        .output()
        .unwrap();
    assert!(env.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("t/suite.jsonl")).unwrap(), text);
}
