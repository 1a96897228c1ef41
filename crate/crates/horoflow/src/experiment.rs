//! One experiment: initial data, flow, artifacts, report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use horoflow_core::flow::run_to_steady;
use horoflow_core::functionals::{minkowski_residual, SurfaceSample};
use horoflow_core::oracle::{convergence_order, OrderEstimate};
use horoflow_core::umbilical::{cap_volume, fit_cap, radius_from_volume, static_residual};
use horoflow_core::{CapSpec, DiagnosticsRecord, FlowState, GridSpec, Mode, RunStatus};

use crate::config::{ConfigWarning, ExperimentConfig};
use crate::error::RunError;
use crate::initial::generate_initial;
use crate::output::{fmt_f64, snapshot_csv, timeseries_csv, write_file};

/// Process exit code for a finished run.
pub fn exit_code(status: RunStatus) -> i32 {
    match status {
        RunStatus::Converged => 0,
        RunStatus::BudgetExhausted => 2,
        RunStatus::StarShapednessLost => 3,
    }
}

/// Exit code for configuration errors.
pub const EXIT_CONFIG: i32 = 4;

/// Final energy against the volume-matched cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyComparison {
    /// Energy of the initial data.
    pub initial: f64,
    /// Energy of the final state.
    pub final_: f64,
    /// Radius of the cap enclosing the initial volume.
    pub r_star: f64,
    /// Energy of that cap.
    pub cap: f64,
    /// `|E(final) − E(cap)| / |E(cap)|`.
    pub relative_gap: f64,
}

/// Compares the final energy with `C_{θ,r*}`, `r*` matching `volume0`.
pub fn energy_compare(
    initial: &FlowState,
    final_state: &FlowState,
    volume0: f64,
) -> Result<EnergyComparison, RunError> {
    let n = final_state.grid().n();
    let r_star = radius_from_volume(final_state.angle(), n, volume0)?;
    let cap = CapSpec::new(final_state.angle(), r_star, n)?.energy();
    let final_ = SurfaceSample::from_state(final_state)?.energy();
    Ok(EnergyComparison {
        initial: SurfaceSample::from_state(initial)?.energy(),
        final_,
        r_star,
        cap,
        relative_gap: (final_ - cap).abs() / cap.abs(),
    })
}

/// Observed orders of the static residual `sup |G|` and of the Minkowski
/// residual on the cap `spec`, over `N_β ∈ {N/2, N, 2N}` (axisymmetric).
pub fn residual_orders(
    spec: &CapSpec,
    n_beta: usize,
) -> Result<(OrderEstimate, OrderEstimate), RunError> {
    let mut stat = [0.0; 3];
    let mut mink = [0.0; 3];
    for (j, nb) in [n_beta / 2, n_beta, 2 * n_beta].into_iter().enumerate() {
        let grid = GridSpec::axisymmetric(spec.n, nb.max(8))?;
        stat[j] = static_residual(spec, grid)?.sup_rhs;
        mink[j] = minkowski_residual(&spec.state(grid)?)?;
    }
    Ok((
        convergence_order(stat[0], stat[1], stat[2]),
        convergence_order(mink[0], mink[1], mink[2]),
    ))
}

/// Summary of a finished experiment.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    /// Termination status.
    pub status: RunStatus,
    /// Accepted steps.
    pub steps: u64,
    /// Final time.
    pub t_final: f64,
    /// Diagnostics time series.
    pub records: Vec<DiagnosticsRecord>,
    /// Initial enclosed volume.
    pub volume0: f64,
    /// `max_t |Vol(t) − Vol₀| / Vol₀` over recorded rows.
    pub max_volume_drift: f64,
    /// Fitted cap of the final state.
    pub r_fit: f64,
    /// `L²(dσ)` distance to the fitted cap.
    pub fit_distance: f64,
    /// Umbilicity deficit of the final state.
    pub final_deficit: f64,
    /// `|V(θ, r_fit) − Vol₀| / Vol₀`.
    pub fit_volume_error: f64,
    /// Energy comparison (converged runs only).
    pub energy: Option<EnergyComparison>,
    /// Static residual order on `C_{θ,r_fit}`.
    pub static_order: OrderEstimate,
    /// Minkowski residual order on `C_{θ,r_fit}`.
    pub minkowski_order: OrderEstimate,
    /// Boundary-condition mismatch of the initial data.
    pub bc_violation: f64,
    /// Configuration warnings.
    pub warnings: Vec<ConfigWarning>,
    /// Diagnostic for abnormal termination.
    pub error: Option<String>,
    /// Written files.
    pub files: Vec<PathBuf>,
}

impl ExperimentReport {
    /// Process exit code.
    pub fn exit_code(&self) -> i32 {
        exit_code(self.status)
    }

    /// `key = value` report text.
    pub fn render(&self, cfg: &ExperimentConfig) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        let order = |o: &OrderEstimate| match o.order() {
            Some(p) => format!("{p:.4}"),
            None => "inconclusive".to_string(),
        };
        kv("status", status_str(self.status).into());
        kv(
            "converged",
            (self.status == RunStatus::Converged).to_string(),
        );
        kv("steps", self.steps.to_string());
        kv("t_final", fmt_f64(self.t_final));
        kv(
            "sup_G_final",
            self.records
                .last()
                .map_or("nan".into(), |r| fmt_f64(r.sup_rhs)),
        );
        kv("volume_initial", fmt_f64(self.volume0));
        kv("volume_drift_max", fmt_f64(self.max_volume_drift));
        kv("r_fit", fmt_f64(self.r_fit));
        kv("fit_distance", fmt_f64(self.fit_distance));
        kv("fit_volume_error", fmt_f64(self.fit_volume_error));
        kv("umbilicity_deficit_final", fmt_f64(self.final_deficit));
        if cfg.mode == Mode::Full2d {
            kv("curvature_residuals", "xi_averaged_profile".into());
        }
        if let Some(e) = &self.energy {
            kv("energy_initial", fmt_f64(e.initial));
            kv("energy_final", fmt_f64(e.final_));
            kv("energy_drop", fmt_f64(e.initial - e.final_));
            kv("r_star", fmt_f64(e.r_star));
            kv("energy_cap", fmt_f64(e.cap));
            kv("energy_gap_relative", fmt_f64(e.relative_gap));
        }
        kv("static_residual_order", order(&self.static_order));
        kv("minkowski_residual_order", order(&self.minkowski_order));
        kv("initial_bc_violation", fmt_f64(self.bc_violation));
        for w in &self.warnings {
            kv("warning", w.to_string());
        }
        if let Some(e) = &self.error {
            kv("error", e.clone());
        }
        out
    }
}

/// Spelling of a status in reports and CLI output.
pub fn status_str(status: RunStatus) -> &'static str {
    match status {
        RunStatus::Converged => "converged",
        RunStatus::BudgetExhausted => "budget_exhausted",
        RunStatus::StarShapednessLost => "star_shapedness_lost",
    }
}

/// Runs `cfg` and writes `timeseries.csv`, `snapshot_initial.csv`,
/// `snapshot_final.csv`, `config.txt` and `report.txt` into `cfg.out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    let warnings = cfg.validate()?;
    let init = generate_initial(cfg)?;
    let dir = cfg.out_dir.as_path();
    fs::create_dir_all(dir).map_err(RunError::io(dir))?;
    let mut files = Vec::new();
    let mut write = |name: &str, text: &str| -> Result<(), RunError> {
        let path = dir.join(name);
        write_file(&path, text)?;
        files.push(path);
        Ok(())
    };
    write("config.txt", &cfg.emit())?;
    write("snapshot_initial.csv", &snapshot_csv(&init.state))?;

    let outcome = run_to_steady(init.state.clone(), &cfg.flow_config())?;
    write("timeseries.csv", &timeseries_csv(&outcome.records))?;
    write("snapshot_final.csv", &snapshot_csv(&outcome.state))?;

    let volume0 = outcome.records.first().map_or(f64::NAN, |r| r.volume);
    let max_volume_drift = outcome
        .records
        .iter()
        .map(|r| (r.volume - volume0).abs() / volume0)
        .fold(0.0, f64::max);
    let fit = fit_cap(&outcome.state)?;
    let angle = outcome.state.angle();
    let fit_spec = CapSpec::new(angle, fit.r_fit, cfg.n)?;
    let fit_volume_error = (cap_volume(&fit_spec) - volume0).abs() / volume0;
    let energy = if outcome.status == RunStatus::Converged {
        Some(energy_compare(&init.state, &outcome.state, volume0)?)
    } else {
        None
    };
    let (static_order, minkowski_order) = residual_orders(&fit_spec, cfg.n_beta)?;

    let report = ExperimentReport {
        status: outcome.status,
        steps: outcome.steps,
        t_final: outcome.state.t(),
        records: outcome.records,
        volume0,
        max_volume_drift,
        r_fit: fit.r_fit,
        fit_distance: fit.distance,
        final_deficit: fit.deficit,
        fit_volume_error,
        energy,
        static_order,
        minkowski_order,
        bc_violation: init.bc_violation,
        warnings,
        error: outcome.error.map(|e| e.to_string()),
        files: Vec::new(),
    };
    write("report.txt", &report.render(cfg))?;
    Ok(ExperimentReport { files, ..report })
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<(ExperimentConfig, Vec<ConfigWarning>), RunError> {
    let text = fs::read_to_string(path).map_err(RunError::io(path))?;
    Ok(ExperimentConfig::parse(&text)?)
}
