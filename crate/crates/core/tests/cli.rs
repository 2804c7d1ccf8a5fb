use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybrid-ee"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const TINY: &str = "[dims]\nn_tx = 4\nn_rf = 2\nn_users = 2\n\n[power]\np_max = 30\n\n[run]\nrealizations = 1\n";

#[test]
fn check_accepts_a_valid_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ok.ini", TINY);
    let out = bin().args(["check", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok: 1 sweep points"));
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.ini", "[dims]\nn_tx = four\n");
    let out = bin().args(["check", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("missing.ini");
    let out = bin().args(["run", "--config"]).arg(&missing).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let cfg = write(dir.path(), "ok.ini", TINY);
    let out = bin().args(["run", "--methods", "nope", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_versioned_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ok.ini", TINY);
    let csv = dir.path().join("out.csv");
    let status = bin()
        .args(["run", "--methods", "heuristic,upper_bound", "--seed", "9", "--jobs", "1", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# hybrid-ee v1");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].contains(",heuristic,") && lines[3].contains(",upper_bound,"));
}

#[test]
fn oracle_command_reports_and_rejects_unknown_names() {
    let out = bin().args(["oracle", "activation"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    let out = bin().args(["oracle", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
