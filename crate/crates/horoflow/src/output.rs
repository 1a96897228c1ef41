//! Time series, snapshot and report files.
//!
//! Floating-point values are written with 17 significant digits
//! (`{:.16e}`), enough to round-trip every `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use horoflow_core::{DiagnosticsRecord, FlowState, Mode};

use crate::error::RunError;

/// First line of every time-series file.
pub const CSV_VERSION_LINE: &str = "# horoflow v1";

/// Column order of the time series.
pub const CSV_COLUMNS: [&str; 15] = [
    "step",
    "t",
    "dt",
    "volume",
    "area",
    "wet",
    "energy",
    "minkowski_residual",
    "sigma2_residual",
    "umbilicity_deficit",
    "rho_min",
    "rho_max",
    "r_fit",
    "min_gXnu",
    "sup_G",
];

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders a time series as CSV text.
pub fn timeseries_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_VERSION_LINE);
    out.push('\n');
    out.push_str(&CSV_COLUMNS.join(","));
    out.push('\n');
    for r in records {
        let floats = [
            r.t,
            r.dt,
            r.volume,
            r.area,
            r.wet,
            r.energy,
            r.minkowski_residual,
            r.sigma2_residual,
            r.umbilicity_deficit,
            r.rho_min,
            r.rho_max,
            r.r_fit,
            r.min_shifted_support,
            r.sup_rhs,
        ];
        let _ = write!(out, "{}", r.step);
        for x in floats {
            let _ = write!(out, ",{}", fmt_f64(x));
        }
        out.push('\n');
    }
    out
}

/// Renders a state as `beta,xi,rho,u` rows (`xi` omitted when axisymmetric).
pub fn snapshot_csv(state: &FlowState) -> String {
    let grid = *state.grid();
    let axis = grid.mode() == Mode::Axisymmetric;
    let mut out = String::from(if axis {
        "beta,rho,u\n"
    } else {
        "beta,xi,rho,u\n"
    });
    for (idx, &u) in state.u().values().iter().enumerate() {
        let (i, k) = grid.row_col(idx);
        let _ = write!(out, "{}", fmt_f64(grid.beta(i)));
        if !axis {
            let _ = write!(out, ",{}", fmt_f64(grid.xi(k)));
        }
        let _ = writeln!(out, ",{},{}", fmt_f64(u.exp()), fmt_f64(u));
    }
    out
}

/// Parses a time series back into records (used for verification).
pub fn parse_timeseries(text: &str) -> Result<Vec<DiagnosticsRecord>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_VERSION_LINE) {
        return Err("missing version line".into());
    }
    if lines.next() != Some(CSV_COLUMNS.join(",").as_str()) {
        return Err("unexpected column header".into());
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != CSV_COLUMNS.len() {
                return Err(format!(
                    "row {}: expected {} fields",
                    i + 1,
                    CSV_COLUMNS.len()
                ));
            }
            let step = fields[0]
                .parse()
                .map_err(|e| format!("row {}: {e}", i + 1))?;
            let mut x = [0.0; 14];
            for (slot, f) in x.iter_mut().zip(&fields[1..]) {
                *slot = f.parse().map_err(|e| format!("row {}: {e}", i + 1))?;
            }
            Ok(DiagnosticsRecord {
                step,
                t: x[0],
                dt: x[1],
                volume: x[2],
                area: x[3],
                wet: x[4],
                energy: x[5],
                minkowski_residual: x[6],
                sigma2_residual: x[7],
                umbilicity_deficit: x[8],
                rho_min: x[9],
                rho_max: x[10],
                r_fit: x[11],
                min_shifted_support: x[12],
                sup_rhs: x[13],
            })
        })
        .collect()
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    fs::write(path, contents).map_err(RunError::io(path))
}
