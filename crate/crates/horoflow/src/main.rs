use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use horoflow::experiment::{load_config, status_str, EXIT_CONFIG};
use horoflow::output::fmt_f64;
use horoflow::{run_experiment, ExperimentConfig, RunError};
use horoflow_core::geometry::ContactAngle;
use horoflow_core::oracle::{convergence_order, OrderEstimate};
use horoflow_core::umbilical::{cap_volume, radius_from_volume, static_residual};
use horoflow_core::{CapSpec, GridSpec};

#[derive(Parser)]
#[command(
    name = "horoflow",
    version,
    about = "Capillary curvature flow in a horoball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the flow described by a configuration file.
    Run {
        /// Configuration file (`key = value` lines). Defaults apply when omitted.
        config: Option<PathBuf>,
        /// Override a key, e.g. `--set n_beta=64`; may be repeated.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Print the default configuration.
    DefaultConfig,
    /// Static residual of a cap over several resolutions, with its order.
    StaticCheck {
        #[arg(long, allow_hyphen_values = true)]
        cos_theta: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Three resolutions, coarse to fine.
        #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256])]
        n_beta: Vec<usize>,
    },
    /// Observed order from errors at spacings h, h/2, h/4.
    ConvergenceOrder {
        e_coarse: f64,
        e_mid: f64,
        e_fine: f64,
    },
    /// Radius of the cap enclosing a given volume.
    RadiusFromVolume {
        #[arg(long, allow_hyphen_values = true)]
        cos_theta: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Target volume.
        #[arg(
            long,
            conflicts_with = "cap_radius",
            required_unless_present = "cap_radius"
        )]
        volume: Option<f64>,
        /// Use the volume of the cap with this radius.
        #[arg(long)]
        cap_radius: Option<f64>,
    },
}

fn order_str(o: &OrderEstimate) -> String {
    match o.order() {
        Some(p) => format!("{p:.4}"),
        None => "inconclusive".into(),
    }
}

fn joined(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",")
}

fn fail(err: RunError) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        RunError::Config(_) | RunError::InitialData(_) => ExitCode::from(EXIT_CONFIG as u8),
        _ => ExitCode::from(1),
    }
}

fn run(config: Option<PathBuf>, overrides: Vec<String>) -> Result<ExitCode, RunError> {
    let mut cfg = match &config {
        Some(path) => load_config(path)?.0,
        None => ExperimentConfig::default(),
    };
    for (i, item) in overrides.iter().enumerate() {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| horoflow::ConfigError::Syntax {
                line: i + 1,
                message: format!("--set expects KEY=VALUE, found `{item}`"),
            })?;
        cfg.set(k.trim(), v.trim())
            .map_err(|message| horoflow::ConfigError::Syntax {
                line: i + 1,
                message,
            })?;
    }
    for w in cfg.validate()? {
        eprintln!("warning: {w}");
    }
    let report = run_experiment(&cfg)?;
    let last = report.records.last();
    let mut line = format!(
        "status={} steps={} t={} sup_G={} volume_drift={} r_fit={} deficit={}",
        status_str(report.status),
        report.steps,
        fmt_f64(report.t_final),
        last.map_or("nan".into(), |r| fmt_f64(r.sup_rhs)),
        fmt_f64(report.max_volume_drift),
        fmt_f64(report.r_fit),
        fmt_f64(report.final_deficit),
    );
    if let Some(e) = &report.energy {
        line.push_str(&format!(" energy_gap={}", fmt_f64(e.relative_gap)));
    }
    line.push_str(&format!(" out_dir={}", cfg.out_dir.display()));
    println!("{line}");
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn static_check(
    cos_theta: f64,
    r: f64,
    n: usize,
    n_beta: Vec<usize>,
) -> Result<ExitCode, RunError> {
    if n_beta.len() != 3 {
        return Err(horoflow::ConfigError::Range {
            key: "n_beta",
            message: "expects three resolutions".into(),
        }
        .into());
    }
    let spec = CapSpec::new(ContactAngle::from_cos(cos_theta)?, r, n)?;
    let mut sup = Vec::new();
    let mut identity = Vec::new();
    for &nb in &n_beta {
        let res = static_residual(&spec, GridSpec::axisymmetric(n, nb)?)?;
        sup.push(res.sup_rhs);
        identity.push(res.sup_identity);
    }
    let o = convergence_order(sup[0], sup[1], sup[2]);
    let oi = convergence_order(identity[0], identity[1], identity[2]);
    println!(
        "cos_theta={cos_theta} r={r} n={n} n_beta={} sup_G={} identity={} order={} identity_order={}",
        n_beta.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        joined(&sup),
        joined(&identity),
        order_str(&o),
        order_str(&oi),
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, overrides } => run(config, overrides),
        Command::DefaultConfig => {
            print!("{}", ExperimentConfig::default().emit());
            Ok(ExitCode::SUCCESS)
        }
        Command::StaticCheck {
            cos_theta,
            r,
            n,
            n_beta,
        } => static_check(cos_theta, r, n, n_beta),
        Command::ConvergenceOrder {
            e_coarse,
            e_mid,
            e_fine,
        } => {
            let o = convergence_order(e_coarse, e_mid, e_fine);
            println!(
                "coarse={} fine={} order={}",
                o.coarse,
                o.fine,
                order_str(&o)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::RadiusFromVolume {
            cos_theta,
            n,
            volume,
            cap_radius,
        } => (|| {
            let angle = ContactAngle::from_cos(cos_theta)?;
            let volume = match (volume, cap_radius) {
                (Some(v), _) => v,
                (None, Some(r)) => cap_volume(&CapSpec::new(angle, r, n)?),
                (None, None) => unreachable!("clap requires one of them"),
            };
            let r = radius_from_volume(angle, n, volume)?;
            println!(
                "cos_theta={cos_theta} n={n} volume={} r={}",
                fmt_f64(volume),
                fmt_f64(r)
            );
            Ok(ExitCode::SUCCESS)
        })(),
    };
    result.unwrap_or_else(fail)
}
