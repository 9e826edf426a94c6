use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mzsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzsim")).args(args).env_remove("MZSIM_THREADS").output().unwrap()
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

#[test]
fn validate_accepts_shipped_configs() {
    for name in ["ligo.toml", "ligo_thermal.toml", "phi_steering.json", "thermal_click_cfi.toml", "pacs_counts.toml", "spsts_probability.toml", "drift.toml"] {
        let out = mzsim(&["validate", "--config", config(name).to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn run_writes_tables_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = mzsim(&["run", "--config", config("phi_steering.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["points.csv", "distributions.csv", "report.json"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["command"], "run");
}

#[test]
fn sweep_grid_flag_to_stdout() {
    let out = mzsim(&["sweep", "--config", config("spsts_probability.toml").to_str().unwrap(), "--grid", "T=0.2:0.8:0.3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 4, "{text}");
}

#[test]
fn invalid_configuration_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "inputs = [{ kind = \"vacuum\" }]\nbogus = 1\n").unwrap();
    let out = mzsim(&["run", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let out = mzsim(&["sweep", "--config", config("phi_steering.json").to_str().unwrap(), "--grid", "nbar=0:1:0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_files_exit_with_one() {
    let out = mzsim(&["run", "--config", "/nonexistent/scenario.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_flag_changes_counts_but_threads_do_not() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("small.toml");
    let text = std::fs::read_to_string(config("pacs_counts.toml")).unwrap().replace("step = 0.05", "step = 0.3");
    std::fs::write(&path, text).unwrap();
    let p = path.to_str().unwrap();
    let a = mzsim(&["counts", "--config", p, "--format", "json", "--threads", "1"]);
    let b = mzsim(&["counts", "--config", p, "--format", "json", "--threads", "3"]);
    let c = mzsim(&["counts", "--config", p, "--format", "json", "--seed", "99"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}
