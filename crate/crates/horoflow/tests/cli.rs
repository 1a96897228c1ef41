use std::fs;
use std::process::{Command, Output};

fn horoflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horoflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
        .unwrap_or_else(|| panic!("no `{key}` in `{line}`"))
}

#[test]
fn default_config_parses_back() {
    let out = horoflow(&["default-config"]);
    assert!(out.status.success());
    let (cfg, warnings) = horoflow::ExperimentConfig::parse(&stdout(&out)).unwrap();
    assert_eq!(cfg, horoflow::ExperimentConfig::default());
    assert!(warnings.is_empty());
}

#[test]
fn converged_run_exits_zero_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = horoflow(&[
        "run",
        "--set",
        "n_beta=32",
        "--set",
        &format!("out_dir={}", out_dir.display()),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let line = stdout(&out);
    assert_eq!(field(&line, "status"), "converged");
    assert!(field(&line, "volume_drift").parse::<f64>().unwrap() <= 1e-4);
    for name in [
        "config.txt",
        "report.txt",
        "timeseries.csv",
        "snapshot_initial.csv",
        "snapshot_final.csv",
    ] {
        assert!(out_dir.join(name).is_file(), "{name}");
    }
    let report = fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("status = converged"));
}

#[test]
fn exhausted_budget_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = horoflow(&[
        "run",
        "--set",
        "n_beta=32",
        "--set",
        "t_max=0.001",
        "--set",
        &format!("out_dir={}", dir.path().display()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(field(&stdout(&out), "status"), "budget_exhausted");
}

#[test]
fn config_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, "n_beta = 32\nbogus = 1\n").unwrap();
    let out = horoflow(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let out = horoflow(&["run", "--set", "epsilon=1.5"]);
    assert_eq!(out.status.code(), Some(4));
    let out = horoflow(&["run", "--set", "mode=full2d", "--set", "n=3"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn missing_config_file_exits_one() {
    let out = horoflow(&["run", "/nonexistent/horoflow.cfg"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn static_check_reports_second_order() {
    let out = horoflow(&[
        "static-check",
        "--cos-theta",
        "-0.3",
        "--n-beta",
        "32,64,128",
    ]);
    assert!(out.status.success());
    let order: f64 = field(&stdout(&out), "order").parse().unwrap();
    assert!(order >= 1.9, "{order}");
}

#[test]
fn convergence_order_of_exact_sequence() {
    let out = horoflow(&["convergence-order", "1e-2", "2.5e-3", "6.25e-4"]);
    assert!(out.status.success());
    let order: f64 = field(&stdout(&out), "order").parse().unwrap();
    assert!((order - 2.0).abs() < 1e-12);
}

#[test]
fn radius_from_cap_volume_round_trips() {
    let out = horoflow(&[
        "radius-from-volume",
        "--cos-theta",
        "0.4",
        "--cap-radius",
        "1.7",
    ]);
    assert!(out.status.success());
    let r: f64 = field(&stdout(&out), "r").parse().unwrap();
    assert!((r - 1.7).abs() < 1e-9);
}
