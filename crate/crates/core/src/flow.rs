//! Time evolution of `u = log ρ` under `∂_t u = G(∇²u, ∇u, ρ, β)` with the
//! capillary condition imposed through ghost nodes.
//!
//! Stepping is explicit Heun (two-stage Runge–Kutta). The step size follows
//! `dt = c_cfl · h² / max (x_{n+1} / (ρ v))`, the largest diffusion
//! coefficient of the principal part. In 2-D the pole ring is slaved to the
//! mean of its neighbour ring and unresolved longitudinal modes near the pole
//! are filtered after every stage, so `h` is the latitude spacing.
//!
//! By default the stepper integrates [`volume_projected_rhs`], which differs
//! from `G` by an `O(h²)` multiple of the constant-normal-speed direction and
//! keeps the discrete enclosed volume fixed.

use alloc::vec::Vec;

use crate::functionals::{self, DiagnosticsRecord, SurfaceSample};
use crate::geometry::{scalar_rhs, speed, support_functions, ContactAngle};
use crate::grid::{average_pole, polar_filter, Field, GridSpec, Mode, RowTrig};
use crate::math::{exp, powi};
use crate::umbilical::unit_profile;
use crate::{Error, Result};

/// A radial graph at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    u: Field,
    t: f64,
    angle: ContactAngle,
}

impl FlowState {
    /// State at `t = 0`.
    pub fn new(u: Field, angle: ContactAngle) -> Result<Self> {
        u.check_finite()?;
        Ok(FlowState { u, t: 0.0, angle })
    }

    /// Same geometry at another time.
    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Grid of the state.
    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    /// `u = log ρ`.
    pub fn u(&self) -> &Field {
        &self.u
    }

    /// Flow time.
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Contact angle.
    pub fn angle(&self) -> ContactAngle {
        self.angle
    }

    /// `ρ = e^u`.
    pub fn rho(&self) -> Field {
        let values = self.u.values().iter().map(|&u| exp(u)).collect();
        Field::new(*self.grid(), values).expect("exp of finite values")
    }

    /// The ξ-averaged profile on an axisymmetric grid (identity in
    /// axisymmetric mode). Averaging is done on `ρ`.
    pub fn xi_averaged(&self) -> Result<FlowState> {
        if self.grid().mode() == Mode::Axisymmetric {
            return Ok(self.clone());
        }
        let avg = self.rho().xi_average();
        let grid = *avg.grid();
        let u = avg.values().iter().map(|r| crate::math::ln(*r)).collect();
        Ok(FlowState {
            u: Field::new(grid, u)?,
            t: self.t,
            angle: self.angle,
        })
    }
}

/// Parameters of [`run_to_steady`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    /// Safety factor of the explicit step, in `(0, 1)`.
    pub c_cfl: f64,
    /// Steady state once `sup |∂_t u|` drops below this.
    pub tol_steady: f64,
    /// Time budget.
    pub t_max: f64,
    /// Diagnostics cadence in steps.
    pub record_every: usize,
    /// Optional cap barriers `(r_inner, r_outer)` checked every step.
    pub barriers: Option<(f64, f64)>,
    /// Remove the component of `G` that changes the discrete enclosed volume
    /// (see [`volume_projected_rhs`]).
    pub conserve_volume: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            c_cfl: 0.2,
            tol_steady: 1e-8,
            t_max: 100.0,
            record_every: 100,
            barriers: None,
            conserve_volume: true,
        }
    }
}

impl FlowConfig {
    /// Range checks.
    pub fn validate(&self) -> Result<()> {
        if !(self.c_cfl > 0.0 && self.c_cfl < 1.0) {
            return Err(Error::InvalidArgument("c_cfl must lie in (0, 1)"));
        }
        if !(self.tol_steady > 0.0) {
            return Err(Error::InvalidArgument("tol_steady must be positive"));
        }
        if !(self.t_max >= 0.0) {
            return Err(Error::InvalidArgument("t_max must be non-negative"));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be at least 1"));
        }
        if let Some((lo, hi)) = self.barriers {
            if !(hi > lo && lo > 0.0) {
                return Err(Error::InvalidArgument(
                    "barriers need r_outer > r_inner > 0",
                ));
            }
        }
        Ok(())
    }
}

/// Summary of one accepted step, describing the state the step started from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// Step size used.
    pub dt: f64,
    /// `sup |G|` at the start of the step.
    pub sup_rhs: f64,
    /// Smallest `ρ`.
    pub min_rho: f64,
    /// Smallest `ḡ(X_{n+1}, ν)`.
    pub min_shifted_support: f64,
    /// Barrier status after the step, when barriers are configured.
    pub barriers: Option<BarrierReport>,
}

/// Evaluates `G` on a sample.
pub fn rhs_from_sample(sample: &SurfaceSample) -> Field {
    let grid = *sample.grid();
    let n = grid.n();
    let angle = sample.angle();
    let mut values: Vec<f64> = sample
        .nodes()
        .iter()
        .map(|node| scalar_rhs(&node.point, node.hess, n, angle))
        .collect();
    if grid.mode() == Mode::Full2d {
        let nx = grid.n_xi();
        let mean = values[nx..2 * nx].iter().sum::<f64>() / nx as f64;
        values[..nx].fill(mean);
    }
    Field::from_raw(grid, values)
}

/// `G − λ v/(ρ e^ω)`, i.e. the normal speed shifted by the constant `λ`
/// that makes the discrete volume stationary:
/// `Σ w (ρ e^ω)^{n+1} (G − λ v/(ρ e^ω)) = 0` with the quadrature weights `w`
/// of the volume functional.
///
/// On a smooth solution `λ` is the quadrature error of `∫ f dA = 0`, so the
/// correction is `O(h²)`. Without it every cap drifts slowly along the family
/// and the discrete flow has no steady state.
pub fn volume_projected_rhs(sample: &SurfaceSample, weights: &[f64]) -> Field {
    let mut g = rhs_from_sample(sample);
    let n = sample.grid().n() as u32;
    let (mut num, mut den) = (0.0, 0.0);
    let phi: Vec<f64> = sample
        .nodes()
        .iter()
        .zip(weights)
        .zip(g.values())
        .map(|((node, w), gv)| {
            let p = &node.point;
            let s = p.rho * p.e_omega;
            let m = w * powi(s, n + 1);
            let phi = p.v / s;
            num += m * gv;
            den += m * phi;
            phi
        })
        .collect();
    let lambda = num / den;
    for (gv, phi) in g.values_mut().iter_mut().zip(&phi) {
        *gv -= lambda * phi;
    }
    g
}

/// `∂_t u` at every node.
pub fn rhs(state: &FlowState) -> Result<Field> {
    let g = rhs_from_sample(&SurfaceSample::from_state(state)?);
    g.check_finite()?;
    Ok(g)
}

/// Normal speed `f` at every node, from the same derivative data as [`rhs`].
pub fn speed_field(state: &FlowState) -> Result<Field> {
    let sample = SurfaceSample::from_state(state)?;
    let n = state.grid().n();
    let values = sample
        .nodes()
        .iter()
        .map(|node| speed(&node.point, node.hess, n, state.angle))
        .collect();
    Field::new(*state.grid(), values)
}

fn max_diffusion(sample: &SurfaceSample) -> f64 {
    sample
        .nodes()
        .iter()
        .map(|node| node.point.height / (node.point.rho * node.point.v))
        .fold(0.0, f64::max)
}

/// Explicit step bound `c_cfl · h² / max_nodes x_{n+1}/(ρ v)`.
pub fn cfl_dt(state: &FlowState, c_cfl: f64) -> Result<f64> {
    let sample = SurfaceSample::from_state(state)?;
    Ok(dt_from_sample(&sample, c_cfl))
}

fn dt_from_sample(sample: &SurfaceSample, c_cfl: f64) -> f64 {
    let h = sample.grid().stability_width();
    c_cfl * h * h / max_diffusion(sample)
}

/// Result of [`barrier_monitor`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierReport {
    /// Nodes strictly between the two caps.
    pub inside: usize,
    /// Nodes on or outside either cap.
    pub outside: usize,
    /// Radius of the smallest cap `C_{θ,r}` containing the surface.
    pub r_max: f64,
    /// Radius of the largest cap `C_{θ,r}` inside the surface.
    pub r_min: f64,
}

/// Per-node cap radius `r(z) = ρ(z) / ρ₁(β)`, inverting the cap profile
/// (linear in `r` at fixed β).
pub fn node_cap_radii(state: &FlowState) -> Field {
    let grid = *state.grid();
    let angle = state.angle;
    let values = state
        .u
        .values()
        .iter()
        .enumerate()
        .map(|(idx, &u)| {
            let (i, _) = grid.row_col(idx);
            exp(u) / unit_profile(angle, grid.beta(i))
        })
        .collect();
    Field::new(grid, values).expect("finite radii")
}

/// Tests each node against the annulus between the caps of radius
/// `r_inner < r_outer`, and reports the extremal enclosing cap radii.
pub fn barrier_monitor(
    state: &FlowState,
    r_inner: f64,
    r_outer: f64,
) -> Result<(Vec<bool>, BarrierReport)> {
    if !(r_outer > r_inner && r_inner > 0.0) {
        return Err(Error::InvalidArgument(
            "barriers need r_outer > r_inner > 0",
        ));
    }
    let radii = node_cap_radii(state);
    let flags: Vec<bool> = radii
        .values()
        .iter()
        .map(|&r| r > r_inner && r < r_outer)
        .collect();
    let inside = flags.iter().filter(|&&f| f).count();
    let report = BarrierReport {
        inside,
        outside: flags.len() - inside,
        r_max: radii
            .values()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max),
        r_min: radii.values().iter().copied().fold(f64::INFINITY, f64::min),
    };
    Ok((flags, report))
}

/// Reusable stepping workspace (row trigonometry).
#[derive(Debug, Clone)]
pub struct Stepper {
    trig: RowTrig,
    grid: GridSpec,
    weights: Option<Vec<f64>>,
}

impl Stepper {
    /// Workspace for `grid`.
    pub fn new(grid: &GridSpec) -> Self {
        Stepper {
            trig: RowTrig::new(grid),
            grid: *grid,
            weights: None,
        }
    }

    /// Workspace whose right-hand side conserves the discrete volume.
    pub fn volume_conserving(grid: &GridSpec) -> Self {
        Stepper {
            weights: Some(grid.quadrature_weights()),
            ..Stepper::new(grid)
        }
    }

    /// The right-hand side this stepper integrates.
    pub fn rhs(&self, sample: &SurfaceSample) -> Field {
        match &self.weights {
            Some(w) => volume_projected_rhs(sample, w),
            None => rhs_from_sample(sample),
        }
    }

    /// Samples the geometry of `state`.
    pub fn sample(&self, state: &FlowState) -> Result<SurfaceSample> {
        debug_assert_eq!(*state.grid(), self.grid);
        SurfaceSample::from_state_with(state, &self.trig)
    }

    fn post_stage(&self, u: &mut Field) {
        if self.grid.mode() == Mode::Full2d {
            polar_filter(u);
            average_pole(u);
        }
    }

    /// Advances `state` by `dt` given the already evaluated first stage.
    fn advance(&self, state: &FlowState, g0: &Field, dt: f64) -> Result<FlowState> {
        let mut u1 = state.u.clone();
        for (u, g) in u1.values_mut().iter_mut().zip(g0.values()) {
            *u += dt * g;
        }
        self.post_stage(&mut u1);
        let stage = FlowState {
            u: u1,
            t: state.t + dt,
            angle: state.angle,
        };
        let g1 = self.rhs(&self.sample(&stage)?);
        let mut u2 = state.u.clone();
        for ((u, a), b) in u2.values_mut().iter_mut().zip(g0.values()).zip(g1.values()) {
            *u += 0.5 * dt * (a + b);
        }
        self.post_stage(&mut u2);
        u2.check_finite()?;
        Ok(FlowState {
            u: u2,
            t: state.t + dt,
            angle: state.angle,
        })
    }

    /// One Heun step of size `dt`.
    pub fn step(&self, state: &FlowState, dt: f64) -> Result<(FlowState, StepReport)> {
        let sample = self.sample(state)?;
        let g0 = self.rhs(&sample);
        g0.check_finite()?;
        let next = self.advance(state, &g0, dt)?;
        let report = StepReport {
            dt,
            sup_rhs: g0.sup_norm(),
            min_rho: sample.min_rho(),
            min_shifted_support: min_shifted(&sample),
            barriers: None,
        };
        Ok((next, report))
    }
}

fn min_shifted(sample: &SurfaceSample) -> f64 {
    sample
        .nodes()
        .iter()
        .map(|node| support_functions(&node.point).shifted)
        .fold(f64::INFINITY, f64::min)
}

/// One Heun step: two evaluations of `G`, ghosts refreshed at each stage.
pub fn step(state: &FlowState, dt: f64) -> Result<(FlowState, StepReport)> {
    Stepper::new(state.grid()).step(state, dt)
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// `sup |G| < tol_steady`.
    Converged,
    /// `t ≥ t_max` before reaching steady state.
    BudgetExhausted,
    /// The radial graph representation broke down; the returned state is the
    /// last valid one.
    StarShapednessLost,
}

/// Output of [`run_to_steady`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Final (or last valid) state.
    pub state: FlowState,
    /// Termination reason.
    pub status: RunStatus,
    /// Accepted steps.
    pub steps: u64,
    /// Diagnostics every `record_every` steps, plus the final state.
    pub records: Vec<DiagnosticsRecord>,
    /// The error that stopped the run, if any.
    pub error: Option<Error>,
}

/// Steps until steady state or the time budget runs out.
pub fn run_to_steady(state: FlowState, config: &FlowConfig) -> Result<RunOutcome> {
    run_to_steady_with(state, config, |_, _| {})
}

/// [`run_to_steady`] with an observer called after every accepted step with
/// the new state and the step report.
pub fn run_to_steady_with(
    state: FlowState,
    config: &FlowConfig,
    mut observer: impl FnMut(&FlowState, &StepReport),
) -> Result<RunOutcome> {
    config.validate()?;
    let stepper = if config.conserve_volume {
        Stepper::volume_conserving(state.grid())
    } else {
        Stepper::new(state.grid())
    };
    let mut state = state;
    let mut records = Vec::new();
    let mut steps: u64 = 0;
    let mut last_dt = 0.0;
    let fail = |state: FlowState, steps, records, err: Error| {
        let status = match err {
            Error::StarShapednessLost { .. } | Error::NonFinite { .. } => {
                RunStatus::StarShapednessLost
            }
            _ => return Err(err),
        };
        Ok(RunOutcome {
            state,
            status,
            steps,
            records,
            error: Some(err),
        })
    };
    loop {
        let sample = match stepper.sample(&state) {
            Ok(s) => s,
            Err(e) => return fail(state, steps, records, e),
        };
        let g0 = stepper.rhs(&sample);
        if let Err(e) = g0.check_finite() {
            return fail(state, steps, records, e);
        }
        let sup = g0.sup_norm();
        let converged = sup < config.tol_steady;
        let exhausted = !converged && state.t >= config.t_max;
        if steps % config.record_every as u64 == 0 || converged || exhausted {
            records.push(functionals::diagnostics_from_sample(
                &state, &sample, steps, last_dt, sup,
            )?);
        }
        if converged {
            return Ok(RunOutcome {
                state,
                status: RunStatus::Converged,
                steps,
                records,
                error: None,
            });
        }
        if exhausted {
            return Ok(RunOutcome {
                state,
                status: RunStatus::BudgetExhausted,
                steps,
                records,
                error: None,
            });
        }
        let dt = dt_from_sample(&sample, config.c_cfl).min(config.t_max - state.t);
        let next = match stepper.advance(&state, &g0, dt) {
            Ok(s) => s,
            Err(e) => return fail(state, steps, records, e),
        };
        let barriers = match config.barriers {
            Some((lo, hi)) => Some(barrier_monitor(&next, lo, hi)?.1),
            None => None,
        };
        let report = StepReport {
            dt,
            sup_rhs: sup,
            min_rho: sample.min_rho(),
            min_shifted_support: min_shifted(&sample),
            barriers,
        };
        state = next;
        steps += 1;
        last_dt = dt;
        observer(&state, &report);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::umbilical::CapSpec;

    fn cap_state(c: f64, r: f64, nb: usize) -> FlowState {
        CapSpec::new(ContactAngle::from_cos(c).unwrap(), r, 2)
            .unwrap()
            .state(GridSpec::axisymmetric(2, nb).unwrap())
            .unwrap()
    }

    #[test]
    fn free_constant_graph_is_exactly_static() {
        let s = cap_state(0.0, 1.3, 33);
        assert_eq!(rhs(&s).unwrap().sup_norm(), 0.0);
        assert!(speed_field(&s).unwrap().sup_norm() < 1e-15);
        let (next, _) = step(&s, 1e-4).unwrap();
        for (a, b) in next.u().values().iter().zip(s.u().values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rhs_and_speed_consistent() {
        let grid = GridSpec::axisymmetric(2, 33).unwrap();
        let u = Field::from_fn(grid, |b, _| 0.1 * crate::math::cos(2.0 * b) - 0.2);
        let s = FlowState::new(u, ContactAngle::from_cos(0.3).unwrap()).unwrap();
        let sample = SurfaceSample::from_state(&s).unwrap();
        let g = rhs(&s).unwrap();
        let f = speed_field(&s).unwrap();
        for ((node, g), f) in sample.nodes().iter().zip(g.values()).zip(f.values()) {
            let p = node.point;
            assert!((p.rho * p.e_omega * g - p.v * f).abs() < 1e-12);
        }
    }

    #[test]
    fn cfl_matches_pole_coefficient() {
        let s = cap_state(0.0, 1.0, 65);
        let h = GridSpec::axisymmetric(2, 65).unwrap().h_beta();
        let dt = cfl_dt(&s, 0.2).unwrap();
        assert!((dt - 0.2 * h * h * 0.5).abs() < 1e-18);
        let s2 = cap_state(0.0, 1.0, 129);
        let ratio = dt / cfl_dt(&s2, 0.2).unwrap();
        assert!((ratio - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cfl_coefficient_on_cap_profile() {
        // x/(ρv) for the c = 0.5, r = 1 cap peaks at the pole: 1.5 / 0.5.
        let s = cap_state(0.5, 1.0, 65);
        let h = s.grid().h_beta();
        let dt = cfl_dt(&s, 0.2).unwrap();
        let coeff = 0.2 * h * h / dt;
        let exact = (0..=2000)
            .map(|k| {
                let b = core::f64::consts::FRAC_PI_2 * k as f64 / 2000.0;
                let spec = CapSpec::new(s.angle(), 1.0, 2).unwrap();
                let j = spec.profile_jet(b);
                let (du, _) = j.log_derivatives();
                (j.rho * crate::math::cos(b) + 1.0) / (j.rho * crate::math::sqrt(1.0 + du * du))
            })
            .fold(0.0, f64::max);
        assert!((coeff - 3.0).abs() < 1e-10);
        assert!((coeff - exact).abs() < 1e-10);
    }

    #[test]
    fn zero_budget_returns_initial_state() {
        let s = cap_state(0.5, 1.0, 33);
        let cfg = FlowConfig {
            t_max: 0.0,
            ..FlowConfig::default()
        };
        let out = run_to_steady(s.clone(), &cfg).unwrap();
        assert_eq!(out.status, RunStatus::BudgetExhausted);
        assert_eq!(out.steps, 0);
        assert_eq!(out.state, s);
        assert_eq!(out.records.len(), 1);
    }

    #[test]
    fn static_start_converges_immediately() {
        let s = cap_state(0.0, 0.8, 33);
        let out = run_to_steady(s, &FlowConfig::default()).unwrap();
        assert_eq!(out.status, RunStatus::Converged);
        assert_eq!(out.steps, 0);
    }

    #[test]
    fn barrier_membership() {
        let s = cap_state(0.5, 1.0, 33);
        let (flags, rep) = barrier_monitor(&s, 0.8, 1.2).unwrap();
        assert!(flags.iter().all(|&f| f));
        assert!((rep.r_max - 1.0).abs() < 1e-14 && (rep.r_min - 1.0).abs() < 1e-14);
        let (flags, rep) = barrier_monitor(&s, 0.5, 0.9).unwrap();
        assert!(flags.iter().all(|&f| !f));
        assert_eq!(rep.outside, 33);
        assert!(barrier_monitor(&s, 1.2, 0.8).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = FlowConfig {
            c_cfl: 1.5,
            ..FlowConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = FlowConfig {
            record_every: 0,
            ..FlowConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn full2d_axisymmetric_input_stays_xi_independent() {
        let grid = GridSpec::full2d(33, 32).unwrap();
        let angle = ContactAngle::from_cos(0.5).unwrap();
        let spec = CapSpec::new(angle, 1.0, 2).unwrap();
        let u = Field::from_fn(grid, |b, _| {
            crate::math::ln(spec.profile_rho(b) * (1.0 + 0.05 * crate::math::cos(2.0 * b)))
        });
        let mut s = FlowState::new(u, angle).unwrap();
        let stepper = Stepper::new(&grid);
        for _ in 0..20 {
            let dt = cfl_dt(&s, 0.2).unwrap();
            s = stepper.step(&s, dt).unwrap().0;
            assert!(s.u().xi_variation() < 1e-12);
        }
    }

    #[test]
    fn projection_holds_discrete_volume() {
        let grid = GridSpec::axisymmetric(2, 33).unwrap();
        let angle = ContactAngle::from_cos(0.5).unwrap();
        let spec = CapSpec::new(angle, 1.0, 2).unwrap();
        let u = Field::from_fn(grid, |b, _| {
            crate::math::ln(spec.profile_rho(b) * (1.0 + 0.05 * crate::math::cos(2.0 * b)))
        });
        let s0 = FlowState::new(u, angle).unwrap();
        let v0 = functionals::enclosed_volume(&s0).unwrap();
        let (mut a, mut b) = (s0.clone(), s0);
        let (sa, sb) = (Stepper::volume_conserving(&grid), Stepper::new(&grid));
        for _ in 0..200 {
            let dt = cfl_dt(&a, 0.2).unwrap();
            a = sa.step(&a, dt).unwrap().0;
            b = sb.step(&b, dt).unwrap().0;
        }
        let va = functionals::enclosed_volume(&a).unwrap();
        let vb = functionals::enclosed_volume(&b).unwrap();
        assert!((va - v0).abs() < 1e-9 * v0, "{va} {v0}");
        assert!((vb - v0).abs() > (va - v0).abs());
    }

    #[test]
    fn projection_vanishes_on_free_constant_graph() {
        let s = cap_state(0.0, 0.7, 33);
        let sample = SurfaceSample::from_state(&s).unwrap();
        let g = volume_projected_rhs(&sample, &s.grid().quadrature_weights());
        assert_eq!(g.sup_norm(), 0.0);
    }
}
