//! Perturbed umbilical caps as initial data.

use std::f64::consts::FRAC_PI_2;

use horoflow_core::geometry::ContactAngle;
use horoflow_core::{CapSpec, Field, FlowState, GridSpec, Mode};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, Perturbation};
use crate::error::RunError;

const RANDOM_BETA_MODES: usize = 4;
const RANDOM_XI_MODES: usize = 3;

/// Initial state with its provenance.
#[derive(Debug, Clone)]
pub struct InitialData {
    /// State at `t = 0`.
    pub state: FlowState,
    /// The cap that was perturbed.
    pub cap: CapSpec,
    /// `max_ξ |∇_β u − cos θ √(1 + |∇u|²)|` at the equator of the initial
    /// data; zero when the perturbation is compatible with the boundary
    /// condition.
    pub bc_violation: f64,
}

/// Closed-form initial data `u₀(β, ξ)`, valid slightly past the equator.
struct Profile {
    cap: CapSpec,
    kind: Perturbation,
    epsilon: f64,
    beta_modes: Vec<f64>,
    xi_modes: Vec<(f64, f64)>,
}

impl Profile {
    fn new(cfg: &ExperimentConfig, cap: CapSpec) -> Self {
        let mut beta_modes = Vec::new();
        let mut xi_modes = Vec::new();
        if cfg.perturbation == Perturbation::Random {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            beta_modes = (0..RANDOM_BETA_MODES)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let norm: f64 = beta_modes.iter().map(|a: &f64| a.abs()).sum();
            beta_modes.iter_mut().for_each(|a| *a /= norm);
            if cfg.mode == Mode::Full2d {
                xi_modes = (0..RANDOM_XI_MODES)
                    .map(|_| {
                        (
                            rng.random_range(-1.0..1.0),
                            rng.random_range(0.0..std::f64::consts::TAU),
                        )
                    })
                    .collect();
                let norm: f64 = xi_modes.iter().map(|(b, _): &(f64, f64)| b.abs()).sum();
                xi_modes.iter_mut().for_each(|(b, _)| *b /= norm);
            }
        }
        Profile {
            cap,
            kind: cfg.perturbation,
            epsilon: cfg.epsilon,
            beta_modes,
            xi_modes,
        }
    }

    /// Multiplicative factor on `ρ`.
    fn factor(&self, beta: f64) -> f64 {
        let eps = self.epsilon;
        match self.kind {
            Perturbation::Cos2Beta => 1.0 + eps * (2.0 * beta).cos(),
            Perturbation::Random => {
                let weight = if self.xi_modes.is_empty() { 1.0 } else { 0.5 };
                1.0 + weight
                    * eps
                    * self
                        .beta_modes
                        .iter()
                        .enumerate()
                        .map(|(k, a)| a * (2.0 * (k + 1) as f64 * beta).cos())
                        .sum::<f64>()
            }
            Perturbation::None | Perturbation::Sin2BetaCos2Xi => 1.0,
        }
    }

    /// Additive term on `u`.
    fn additive(&self, beta: f64, xi: f64) -> f64 {
        let eps = self.epsilon;
        match self.kind {
            Perturbation::Sin2BetaCos2Xi => eps * beta.sin().powi(2) * (2.0 * xi).cos(),
            Perturbation::Random => {
                0.5 * eps
                    * self
                        .xi_modes
                        .iter()
                        .enumerate()
                        .map(|(m, (b, phase))| {
                            let m = (m + 1) as i32;
                            b * beta.sin().powi(m) * (f64::from(m) * xi + phase).cos()
                        })
                        .sum::<f64>()
            }
            _ => 0.0,
        }
    }

    fn u(&self, beta: f64, xi: f64) -> f64 {
        (self.cap.profile_rho(beta) * self.factor(beta)).ln() + self.additive(beta, xi)
    }

    fn min_factor(&self, grid: &GridSpec) -> f64 {
        (0..grid.n_beta())
            .map(|i| self.factor(grid.beta(i)))
            .fold(f64::INFINITY, f64::min)
    }

    fn bc_violation(&self, grid: &GridSpec, angle: ContactAngle) -> f64 {
        let h = 1e-5;
        let b = FRAC_PI_2;
        (0..grid.n_xi())
            .map(|k| {
                let xi = grid.xi(k);
                let d_beta = (self.u(b + h, xi) - self.u(b - h, xi)) / (2.0 * h);
                let d_xi = match grid.mode() {
                    Mode::Axisymmetric => 0.0,
                    Mode::Full2d => (self.u(b, xi + h) - self.u(b, xi - h)) / (2.0 * h),
                };
                let v = (1.0 + d_beta * d_beta + d_xi * d_xi).sqrt();
                (d_beta - angle.cos() * v).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Builds the grid and the perturbed cap `u₀` described by `cfg`.
pub fn generate_initial(cfg: &ExperimentConfig) -> Result<InitialData, RunError> {
    let grid = GridSpec::new(cfg.n, cfg.mode, cfg.n_beta, cfg.n_xi)?;
    let angle = ContactAngle::from_cos(cfg.cos_theta)?;
    let cap = CapSpec::new(angle, cfg.r0, cfg.n)?;
    let profile = Profile::new(cfg, cap);
    let min = profile.min_factor(&grid);
    if !(min > 0.0) {
        return Err(RunError::InitialData(format!(
            "epsilon = {} makes rho_0 non-positive (min factor {min})",
            cfg.epsilon
        )));
    }
    let u = Field::from_fn(grid, |b, x| profile.u(b, x));
    let bc_violation = profile.bc_violation(&grid, angle);
    let state = FlowState::new(u, angle)?;
    Ok(InitialData {
        state,
        cap,
        bc_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap().0
    }

    #[test]
    fn unperturbed_is_the_cap() {
        let c = cfg("perturbation = none\nn_beta = 33");
        let init = generate_initial(&c).unwrap();
        let exact = init.cap.log_profile(*init.state.grid());
        for (a, b) in init.state.u().values().iter().zip(exact.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(init.bc_violation < 1e-9);
    }

    #[test]
    fn cos2beta_is_boundary_compatible() {
        let init = generate_initial(&cfg("n_beta = 33")).unwrap();
        assert!(init.bc_violation < 1e-9, "{}", init.bc_violation);
        let g = *init.state.grid();
        let rho = init.state.rho();
        let ratio = rho.at(0, 0) / init.cap.profile_rho(0.0);
        assert!((ratio - 1.05).abs() < 1e-14);
        assert!(
            (rho.at(g.equator_row(), 0) / init.cap.profile_rho(FRAC_PI_2) - 0.95).abs() < 1e-14
        );
    }

    #[test]
    fn free_full2d_perturbation_is_compatible() {
        let init = generate_initial(&cfg(
            "mode = full2d\nn_beta = 17\nn_xi = 16\ncos_theta = 0\nperturbation = sin2beta_cos2xi",
        ))
        .unwrap();
        assert!(init.bc_violation < 1e-9);
        assert!(init.state.u().xi_variation() > 0.09);
    }

    #[test]
    fn capillary_full2d_flags_violation() {
        let init = generate_initial(&cfg(
            "mode = full2d\nn_beta = 17\nn_xi = 16\ncos_theta = 0.5\nperturbation = sin2beta_cos2xi",
        ))
        .unwrap();
        assert!(init.bc_violation > 1e-4);
    }

    #[test]
    fn refuses_non_positive_radius() {
        let err = generate_initial(&cfg("epsilon = 1.0")).unwrap_err();
        assert!(matches!(err, RunError::InitialData(_)));
        assert!(generate_initial(&cfg("epsilon = 0.99")).is_ok());
    }

    #[test]
    fn random_is_seeded_and_compatible() {
        let a = generate_initial(&cfg("perturbation = random\nseed = 3\nn_beta = 33")).unwrap();
        let b = generate_initial(&cfg("perturbation = random\nseed = 3\nn_beta = 33")).unwrap();
        let c = generate_initial(&cfg("perturbation = random\nseed = 4\nn_beta = 33")).unwrap();
        assert_eq!(a.state.u(), b.state.u());
        assert_ne!(a.state.u(), c.state.u());
        assert!(a.bc_violation < 1e-9);
        let d = generate_initial(&cfg(
            "perturbation = random\nmode = full2d\ncos_theta = 0\nn_beta = 17\nn_xi = 16",
        ))
        .unwrap();
        assert!(d.bc_violation < 1e-9);
        assert!(d.state.u().xi_variation() > 0.0);
    }
}
