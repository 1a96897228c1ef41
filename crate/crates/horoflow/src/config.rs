//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored; a trailing `# …` after
//! a value is a comment. Every key is optional and defaults as in
//! [`ExperimentConfig::default`]. Unknown or repeated keys are errors.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use horoflow_core::{cos_theta_threshold, FlowConfig, Mode};

use crate::error::ConfigError;

/// Initial perturbation of the umbilical cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Perturbation {
    /// Exact cap.
    None,
    /// `ρ₀ = ρ_cap · (1 + ε cos 2β)`.
    Cos2Beta,
    /// `u₀ = u_cap + ε sin²β cos 2ξ` (2-D only).
    Sin2BetaCos2Xi,
    /// Seeded random combination of boundary-compatible modes.
    Random,
}

impl Perturbation {
    /// Config spelling.
    pub fn as_str(self) -> &'static str {
        match self {
            Perturbation::None => "none",
            Perturbation::Cos2Beta => "cos2beta",
            Perturbation::Sin2BetaCos2Xi => "sin2beta_cos2xi",
            Perturbation::Random => "random",
        }
    }
}

impl FromStr for Perturbation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Perturbation::None),
            "cos2beta" => Ok(Perturbation::Cos2Beta),
            "sin2beta_cos2xi" => Ok(Perturbation::Sin2BetaCos2Xi),
            "random" => Ok(Perturbation::Random),
            other => Err(format!(
                "unknown perturbation `{other}` (none, cos2beta, sin2beta_cos2xi, random)"
            )),
        }
    }
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Hypersurface dimension.
    pub n: usize,
    /// Axisymmetric or 2-D grid.
    pub mode: Mode,
    /// Latitude nodes.
    pub n_beta: usize,
    /// Longitude nodes (2-D only).
    pub n_xi: usize,
    /// Contact angle cosine.
    pub cos_theta: f64,
    /// Radius of the cap that is perturbed.
    pub r0: f64,
    /// Perturbation kind.
    pub perturbation: Perturbation,
    /// Perturbation amplitude.
    pub epsilon: f64,
    /// Seed of the random perturbation.
    pub seed: u64,
    /// Explicit-step safety factor.
    pub c_cfl: f64,
    /// Steady-state tolerance on `sup |∂_t u|`.
    pub tol_steady: f64,
    /// Time budget.
    pub t_max: f64,
    /// Diagnostics cadence in steps.
    pub record_every: usize,
    /// Output directory.
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let flow = FlowConfig::default();
        ExperimentConfig {
            n: 2,
            mode: Mode::Axisymmetric,
            n_beta: 128,
            n_xi: 128,
            cos_theta: 0.5,
            r0: 1.0,
            perturbation: Perturbation::Cos2Beta,
            epsilon: 0.05,
            seed: 0,
            c_cfl: flow.c_cfl,
            tol_steady: flow.tol_steady,
            t_max: flow.t_max,
            record_every: flow.record_every,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// Non-fatal remarks produced while parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigWarning {
    /// `|cos θ|` at or above `(3n + 1)/(5n − 1)`, outside the range where
    /// convergence is proved.
    AngleBeyondThreshold {
        /// Configured value.
        cos_theta: f64,
        /// Threshold for this `n`.
        threshold: f64,
    },
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigWarning::AngleBeyondThreshold {
                cos_theta,
                threshold,
            } => write!(
                f,
                "|cos_theta| = {} is not below (3n+1)/(5n-1) = {threshold:.6}; convergence is not guaranteed",
                cos_theta.abs()
            ),
        }
    }
}

const KEYS: [&str; 14] = [
    "n",
    "mode",
    "n_beta",
    "n_xi",
    "cos_theta",
    "r0",
    "perturbation",
    "epsilon",
    "seed",
    "c_cfl",
    "tol_steady",
    "t_max",
    "record_every",
    "out_dir",
];

fn mode_str(mode: Mode) -> &'static str {
    match mode {
        Mode::Axisymmetric => "axisymmetric",
        Mode::Full2d => "full2d",
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "axisymmetric" | "axisym" => Ok(Mode::Axisymmetric),
        "full2d" => Ok(Mode::Full2d),
        other => Err(format!("unknown mode `{other}` (axisymmetric, full2d)")),
    }
}

fn parse_value<T: FromStr>(value: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| format!("`{value}`: {e}"))
}

impl ExperimentConfig {
    /// Parses configuration text, then validates it.
    pub fn parse(text: &str) -> Result<(Self, Vec<ConfigWarning>), ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, found `{body}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let known = KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| ConfigError::Syntax {
                    line,
                    message: format!("unknown key `{key}`"),
                })?;
            if seen.contains(known) {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            seen.push(known);
            cfg.set(key, value)
                .map_err(|message| ConfigError::Syntax { line, message })?;
        }
        let warnings = cfg.validate()?;
        Ok((cfg, warnings))
    }

    /// Assigns one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "n" => self.n = parse_value(value)?,
            "mode" => self.mode = parse_mode(value)?,
            "n_beta" => self.n_beta = parse_value(value)?,
            "n_xi" => self.n_xi = parse_value(value)?,
            "cos_theta" => self.cos_theta = parse_value(value)?,
            "r0" => self.r0 = parse_value(value)?,
            "perturbation" => self.perturbation = value.parse()?,
            "epsilon" => self.epsilon = parse_value(value)?,
            "seed" => self.seed = parse_value(value)?,
            "c_cfl" => self.c_cfl = parse_value(value)?,
            "tol_steady" => self.tol_steady = parse_value(value)?,
            "t_max" => self.t_max = parse_value(value)?,
            "record_every" => self.record_every = parse_value(value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Range checks; returns warnings for accepted but unusual settings.
    pub fn validate(&self) -> Result<Vec<ConfigWarning>, ConfigError> {
        let range = |key: &'static str, message: &str| {
            Err(ConfigError::Range {
                key,
                message: message.to_string(),
            })
        };
        if !(self.cos_theta > -1.0 && self.cos_theta < 1.0) {
            return range("cos_theta", "must lie in (-1, 1)");
        }
        if self.n < 2 {
            return range("n", "must be at least 2");
        }
        if self.mode == Mode::Full2d && self.n != 2 {
            return range("mode", "full2d requires n = 2");
        }
        if self.n_beta < 8 {
            return range("n_beta", "must be at least 8");
        }
        if self.mode == Mode::Full2d && (self.n_xi < 8 || self.n_xi % 2 == 1) {
            return range("n_xi", "must be even and at least 8");
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return range("r0", "must be positive");
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return range("epsilon", "must be non-negative");
        }
        if self.perturbation == Perturbation::Sin2BetaCos2Xi && self.mode != Mode::Full2d {
            return range("perturbation", "sin2beta_cos2xi needs mode = full2d");
        }
        self.flow_config()
            .validate()
            .map_err(|e| ConfigError::Range {
                key: "flow",
                message: e.to_string(),
            })?;
        let threshold = cos_theta_threshold(self.n);
        let mut warnings = Vec::new();
        if self.cos_theta.abs() >= threshold {
            warnings.push(ConfigWarning::AngleBeyondThreshold {
                cos_theta: self.cos_theta,
                threshold,
            });
        }
        Ok(warnings)
    }

    /// Stepping parameters.
    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            c_cfl: self.c_cfl,
            tol_steady: self.tol_steady,
            t_max: self.t_max,
            record_every: self.record_every,
            ..FlowConfig::default()
        }
    }

    /// Serialises every effective value; [`ExperimentConfig::parse`] reads it
    /// back unchanged.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("n", self.n.to_string());
        line("mode", mode_str(self.mode).to_string());
        line("n_beta", self.n_beta.to_string());
        line("n_xi", self.n_xi.to_string());
        line("cos_theta", format!("{:?}", self.cos_theta));
        line("r0", format!("{:?}", self.r0));
        line("perturbation", self.perturbation.as_str().to_string());
        line("epsilon", format!("{:?}", self.epsilon));
        line("seed", self.seed.to_string());
        line("c_cfl", format!("{:?}", self.c_cfl));
        line("tol_steady", format!("{:?}", self.tol_steady));
        line("t_max", format!("{:?}", self.t_max));
        line("record_every", self.record_every.to_string());
        line("out_dir", self.out_dir.display().to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let (cfg, warnings) = ExperimentConfig::parse("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert!(warnings.is_empty());
    }

    #[test]
    fn parses_keys_and_comments() {
        let text =
            "# reference\nn = 3\ncos_theta = -0.25  # wetting\n\nmode=axisymmetric\nseed = 7\n";
        let (cfg, _) = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.n, 3);
        assert_eq!(cfg.cos_theta, -0.25);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn warns_at_threshold() {
        let (_, w) = ExperimentConfig::parse("cos_theta = 0.7778").unwrap();
        assert_eq!(w.len(), 1);
        let (_, w) = ExperimentConfig::parse("cos_theta = 0.7777").unwrap();
        assert!(w.is_empty());
        let (_, w) = ExperimentConfig::parse("cos_theta = -0.8").unwrap();
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn rejects_out_of_range_angle() {
        let err = ExperimentConfig::parse("cos_theta = 1.5").unwrap_err();
        assert!(matches!(
            err,
            ConfigError::Range {
                key: "cos_theta",
                ..
            }
        ));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("n = 2\n\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 3, .. }), "{err}");
        let err = ExperimentConfig::parse("n = 2\nn_beta = many\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }));
        let err = ExperimentConfig::parse("n = 2\nn = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }));
        let err = ExperimentConfig::parse("just words").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 1, .. }));
    }

    #[test]
    fn emit_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.mode = Mode::Full2d;
        cfg.n_beta = 64;
        cfg.cos_theta = 0.1 + 0.2;
        cfg.perturbation = Perturbation::Sin2BetaCos2Xi;
        cfg.tol_steady = 3.3e-9;
        cfg.out_dir = PathBuf::from("runs/a b");
        let (back, _) = ExperimentConfig::parse(&cfg.emit()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn mode_constraints() {
        assert!(ExperimentConfig::parse("mode = full2d\nn = 3").is_err());
        assert!(ExperimentConfig::parse("perturbation = sin2beta_cos2xi").is_err());
        assert!(ExperimentConfig::parse("mode = full2d\nn_xi = 9").is_err());
        assert!(ExperimentConfig::parse("epsilon = -0.1").is_err());
        assert!(ExperimentConfig::parse("c_cfl = 0").is_err());
    }
}
