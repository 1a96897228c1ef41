//! The static umbilical caps `C_{θ,r}(E_{n+1})`.
//!
//! The cap is the part above the horosphere of the Euclidean sphere
//! `|x − (1 − r cos θ) E_{n+1}| = r`. Solving the sphere equation along the
//! ray from `E_{n+1}` at polar angle β gives the radial profile
//!
//! ```text
//! ρ(β) = r (√(1 − cos²θ sin²β) − cos θ cos β)
//! ```
//!
//! which is linear in `r`. All principal curvatures equal `1/r − cos θ`.

use core::f64::consts::FRAC_PI_2;

use crate::flow::{self, FlowState};
use crate::functionals::{self, SurfaceSample};
use crate::geometry::{support_functions, ContactAngle};
use crate::grid::{sphere_measure, Field, GridSpec, Mode};
use crate::math::{cos, ln, powi, sin, sqrt};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// An umbilical model hypersurface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapSpec {
    /// Contact angle with the horosphere.
    pub angle: ContactAngle,
    /// Euclidean radius of the sphere.
    pub r: f64,
    /// Hypersurface dimension.
    pub n: usize,
}

/// `(ρ, ρ', ρ'')` of a cap profile at β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    /// `ρ(β)`.
    pub rho: f64,
    /// `dρ/dβ`.
    pub d_rho: f64,
    /// `d²ρ/dβ²`.
    pub dd_rho: f64,
}

impl ProfileJet {
    /// `(u', u'')` for `u = log ρ`.
    pub fn log_derivatives(&self) -> (f64, f64) {
        let du = self.d_rho / self.rho;
        (du, self.dd_rho / self.rho - du * du)
    }
}

/// Profile of the unit cap (`r = 1`); scale by `r`.
pub fn unit_profile(angle: ContactAngle, beta: f64) -> f64 {
    let c = angle.cos();
    let sb = sin(beta);
    sqrt(1.0 - c * c * sb * sb) - c * cos(beta)
}

impl CapSpec {
    /// Validated constructor.
    pub fn new(angle: ContactAngle, r: f64, n: usize) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument("cap radius must be positive"));
        }
        if n < 2 {
            return Err(Error::InvalidArgument("dimension n must be at least 2"));
        }
        Ok(CapSpec { angle, r, n })
    }

    /// Height of the Euclidean centre, `1 − r cos θ`.
    pub fn center_height(&self) -> f64 {
        1.0 - self.r * self.angle.cos()
    }

    /// `ρ(β)`.
    pub fn profile_rho(&self, beta: f64) -> f64 {
        self.r * unit_profile(self.angle, beta)
    }

    /// Analytic `(ρ, ρ', ρ'')`.
    pub fn profile_jet(&self, beta: f64) -> ProfileJet {
        let c = self.angle.cos();
        let (sb, cb) = (sin(beta), cos(beta));
        let root = sqrt(1.0 - c * c * sb * sb);
        let d_root = -c * c * sb * cb / root;
        let dd_root = -c * c * (cb * cb - sb * sb) / root
            - c * c * c * c * sb * sb * cb * cb / (root * root * root);
        ProfileJet {
            rho: self.r * (root - c * cb),
            d_rho: self.r * (d_root + c * sb),
            dd_rho: self.r * (dd_root + c * cb),
        }
    }

    /// Principal curvature `κ = 1/r − cos θ`.
    pub fn curvature(&self) -> f64 {
        cap_curvature(self)
    }

    /// Mean curvature `n κ`.
    pub fn mean_curvature(&self) -> f64 {
        self.n as f64 * self.curvature()
    }

    /// `u = log ρ` sampled on `grid` (ξ-independent).
    pub fn log_profile(&self, grid: GridSpec) -> Field {
        Field::from_fn(grid, |b, _| ln(self.profile_rho(b)))
    }

    /// Flow state for this cap at `t = 0`.
    pub fn state(&self, grid: GridSpec) -> Result<FlowState> {
        if grid.n() != self.n {
            return Err(Error::InvalidArgument("grid dimension does not match cap"));
        }
        FlowState::new(self.log_profile(grid), self.angle)
    }

    /// Hyperbolic area, by Gauss–Legendre quadrature of the analytic integrand
    /// `ρⁿ v / x_{n+1}ⁿ · sin^{n−1} β`.
    pub fn area(&self) -> f64 {
        let rule = GaussLegendre::new(16);
        let n = self.n as u32;
        sphere_measure(self.n)
            * rule.integrate_composite(0.0, FRAC_PI_2, 32, |b| {
                let j = self.profile_jet(b);
                let (du, _) = j.log_derivatives();
                let x = j.rho * cos(b) + 1.0;
                powi(j.rho / x, n) * sqrt(1.0 + du * du) * powi(sin(b), n - 1)
            })
    }

    /// Flat area of the wetted disk, `|S^{n−1}| (r sin θ)ⁿ / n`.
    pub fn wetted_area(&self) -> f64 {
        let rb = self.r * self.angle.sin();
        sphere_measure(self.n) * powi(rb, self.n as u32) / self.n as f64
    }

    /// Capillary energy `Area − cos θ · Wet`.
    pub fn energy(&self) -> f64 {
        self.area() - self.angle.cos() * self.wetted_area()
    }
}

/// `κ = 1/r − cos θ`.
pub fn cap_curvature(spec: &CapSpec) -> f64 {
    1.0 / spec.r - spec.angle.cos()
}

/// Hyperbolic volume enclosed between the cap and the horosphere:
/// `|S^{n−1}| ∫_0^{π/2} sin^{n−1}β ∫_0^{ρ(β)} sⁿ (1 + s cos β)^{−(n+1)} ds dβ`,
/// with composite Gauss–Legendre in β and a 16-point rule in `s`.
pub fn cap_volume(spec: &CapSpec) -> f64 {
    let outer = GaussLegendre::new(16);
    let inner = GaussLegendre::new(16);
    let n = spec.n as u32;
    sphere_measure(spec.n)
        * outer.integrate_composite(0.0, FRAC_PI_2, 32, |b| {
            let rho = spec.profile_rho(b);
            let cb = cos(b);
            let radial = inner.integrate(0.0, rho, |s| powi(s, n) / powi(1.0 + s * cb, n + 1));
            radial * powi(sin(b), n - 1)
        })
}

/// Radius `r*` of the cap with prescribed volume, by bisection on the
/// strictly increasing map `r ↦ cap_volume`.
pub fn radius_from_volume(angle: ContactAngle, n: usize, volume: f64) -> Result<f64> {
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(Error::InvalidArgument("target volume must be positive"));
    }
    let vol = |r: f64| cap_volume(&CapSpec { angle, r, n });
    let (mut lo, mut hi) = (1.0, 1.0);
    for _ in 0..200 {
        if vol(hi) >= volume {
            break;
        }
        hi *= 2.0;
    }
    for _ in 0..2000 {
        if vol(lo) <= volume {
            break;
        }
        lo *= 0.5;
    }
    if !(vol(lo) <= volume && vol(hi) >= volume) {
        return Err(Error::NoConvergence("could not bracket the cap radius"));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if vol(mid) < volume {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Discrete static residuals of a cap on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticResidual {
    /// `sup |G|` over all nodes.
    pub sup_rhs: f64,
    /// `sup |(1/x_{n+1} − cos θ ḡ(x,ν)) − κ ḡ(X_{n+1},ν)|` with discrete
    /// derivatives.
    pub sup_identity: f64,
}

/// Evaluates the flow right-hand side and the pointwise cap identity on the
/// sampled profile.
pub fn static_residual(spec: &CapSpec, grid: GridSpec) -> Result<StaticResidual> {
    let state = spec.state(grid)?;
    let sample = SurfaceSample::from_state(&state)?;
    let sup_rhs = flow::rhs_from_sample(&sample).sup_norm();
    Ok(StaticResidual {
        sup_rhs,
        sup_identity: sup_identity_residual(spec, &sample),
    })
}

/// The pointwise cap identity evaluated with analytic profile derivatives.
pub fn analytic_identity_residual(spec: &CapSpec, grid: GridSpec) -> Result<f64> {
    let sample = SurfaceSample::from_cap(spec, grid)?;
    Ok(sup_identity_residual(spec, &sample))
}

fn sup_identity_residual(spec: &CapSpec, sample: &SurfaceSample) -> f64 {
    let kappa = spec.curvature();
    let c = spec.angle.cos();
    sample
        .nodes()
        .iter()
        .map(|node| {
            let s = support_functions(&node.point);
            ((node.point.e_omega - c * s.position) - kappa * s.shifted).abs()
        })
        .fold(0.0, f64::max)
}

/// Best-fitting cap around `E_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapFit {
    /// Radius minimising the `L²(dσ)` distance of the profiles.
    pub r_fit: f64,
    /// `‖ρ − ρ_cap(r_fit)‖_{L²(dσ)}`.
    pub distance: f64,
    /// Umbilicity deficit of the state (ξ-averaged in 2-D).
    pub deficit: f64,
}

/// Fits the cap family to a state. Since `ρ_cap` is linear in `r` the
/// one-dimensional least-squares problem has the closed-form minimiser
/// `r = ⟨ρ, ρ₁⟩ / ⟨ρ₁, ρ₁⟩`, `ρ₁` the unit profile.
pub fn fit_cap(state: &FlowState) -> Result<CapFit> {
    let grid = *state.grid();
    let unit = Field::from_fn(grid, |b, _| unit_profile(state.angle(), b));
    let rho = state.rho();
    let w = grid.quadrature_weights();
    let r_fit = functionals::fit_radius(state);
    let dist_sq: f64 = w
        .iter()
        .zip(rho.values())
        .zip(unit.values())
        .map(|((w, p), q)| w * (p - r_fit * q) * (p - r_fit * q))
        .sum();
    let deficit = match grid.mode() {
        Mode::Axisymmetric => functionals::umbilicity_deficit(&SurfaceSample::from_state(state)?)?,
        Mode::Full2d => {
            let axis = state.xi_averaged()?;
            functionals::umbilicity_deficit(&SurfaceSample::from_state(&axis)?)?
        }
    };
    Ok(CapFit {
        r_fit,
        distance: sqrt(dist_sq.max(0.0)),
        deficit,
    })
}
