use horoflow::output::parse_timeseries;
use horoflow::{run_experiment, ExperimentConfig, Perturbation};
use horoflow_core::geometry::ContactAngle;
use horoflow_core::umbilical::cap_volume;
use horoflow_core::CapSpec;

fn config(dir: &std::path::Path, extra: &str) -> ExperimentConfig {
    let (mut cfg, _) = ExperimentConfig::parse(&format!("n_beta = 32\n{extra}")).unwrap();
    cfg.out_dir = dir.to_path_buf();
    cfg
}

#[test]
fn timeseries_matches_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "");
    let report = run_experiment(&cfg).unwrap();
    let text = std::fs::read_to_string(dir.path().join("timeseries.csv")).unwrap();
    let rows = parse_timeseries(&text).unwrap();
    assert_eq!(rows, report.records);
    for pair in rows.windows(2) {
        assert!(pair[1].energy <= pair[0].energy + 1e-10 * (1.0 + pair[0].energy.abs()));
        assert!(pair[1].t > pair[0].t);
    }
    assert_eq!(rows.last().unwrap().step, report.steps);
}

#[test]
fn unperturbed_cap_is_already_steady() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "perturbation = none\ncos_theta = -0.25\nr0 = 0.7",
    );
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.exit_code(), 0);
    assert!((report.r_fit - 0.7).abs() < 1e-3);
    let exact = cap_volume(&CapSpec::new(ContactAngle::from_cos(-0.25).unwrap(), 0.7, 2).unwrap());
    assert!((report.volume0 - exact).abs() < 1e-3 * exact);
}

#[test]
fn random_perturbation_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let extra = "perturbation = random\nseed = 5\nt_max = 0.05";
    let ra = run_experiment(&config(a.path(), extra)).unwrap();
    let rb = run_experiment(&config(b.path(), extra)).unwrap();
    assert_eq!(ra.records, rb.records);
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("snapshot_final.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(config(a.path(), extra).perturbation, Perturbation::Random);
}
