//! Global quantities of a radial graph: enclosed hyperbolic volume, area,
//! wetting area, capillary energy, and residuals of the integral identities
//! satisfied by capillary hypersurfaces in the horoball.
//!
//! Integrals over the surface are pulled back to the half-sphere with the
//! hyperbolic area element `dA = ρⁿ v / x_{n+1}ⁿ dσ` and evaluated with the
//! trapezoid rule of [`crate::grid::integrate`].

use alloc::vec::Vec;

use crate::flow::FlowState;
use crate::geometry::{
    mean_curvature, principal_curvatures_axisym, speed, support_functions, ContactAngle,
    SurfacePoint,
};
use crate::grid::{
    apply_capillary_ghost, differentiate_with, integrate_values, Field, GridSpec, Mode, RowTrig,
};
use crate::math::{exp, powi, sqrt};
use crate::quadrature::GaussLegendre;
use crate::umbilical::{unit_profile, CapSpec};
use crate::{Error, Result};

/// Geometry and frame Hessian at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSample {
    /// First-order data.
    pub point: SurfacePoint,
    /// Frame Hessian of `u`, `[h_ββ, h_βξ, h_ξξ]`.
    pub hess: [f64; 3],
}

/// Pointwise geometry at every node of a grid, from finite differences of a
/// state or from the analytic profile of a cap.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSample {
    grid: GridSpec,
    angle: ContactAngle,
    nodes: Vec<NodeSample>,
}

impl SurfaceSample {
    /// Finite-difference sample of a state, ghosts enforcing the capillary
    /// condition.
    pub fn from_state(state: &FlowState) -> Result<Self> {
        Self::from_state_with(state, &RowTrig::new(state.grid()))
    }

    /// [`SurfaceSample::from_state`] with a cached row table.
    pub fn from_state_with(state: &FlowState, trig: &RowTrig) -> Result<Self> {
        let grid = *state.grid();
        let ghosted = apply_capillary_ghost(state.u(), state.angle())?;
        let jets = differentiate_with(&ghosted, trig)?;
        let mut nodes = Vec::with_capacity(grid.len());
        for (idx, (jet, &u)) in jets.iter().zip(state.u().values()).enumerate() {
            let i = idx / grid.n_xi();
            let rho = exp(u);
            if !(rho > 0.0) || !rho.is_finite() {
                return Err(Error::StarShapednessLost {
                    node: idx,
                    beta: grid.beta(i),
                    value: rho,
                });
            }
            let cb = trig.cos[i];
            let grad_sq = jet.grad[0] * jet.grad[0] + jet.grad[1] * jet.grad[1];
            let v = sqrt(1.0 + grad_sq);
            let height = rho * cb + 1.0;
            let point = SurfacePoint {
                beta: grid.beta(i),
                xi: grid.xi(idx % grid.n_xi()),
                sin_beta: trig.sin[i],
                cos_beta: cb,
                rho,
                u,
                grad: jet.grad,
                grad_sq,
                v,
                height,
                e_omega: 1.0 / height,
            };
            let shifted = rho / (height * v);
            if !(shifted > 0.0) {
                return Err(Error::StarShapednessLost {
                    node: idx,
                    beta: point.beta,
                    value: shifted,
                });
            }
            nodes.push(NodeSample {
                point,
                hess: jet.hess,
            });
        }
        Ok(SurfaceSample {
            grid,
            angle: state.angle(),
            nodes,
        })
    }

    /// Sample of a cap using exact profile derivatives (ξ-independent).
    pub fn from_cap(spec: &CapSpec, grid: GridSpec) -> Result<Self> {
        if grid.n() != spec.n {
            return Err(Error::InvalidArgument("grid dimension does not match cap"));
        }
        let mut nodes = Vec::with_capacity(grid.len());
        for i in 0..grid.n_beta() {
            let beta = grid.beta(i);
            let jet = spec.profile_jet(beta);
            let (du, ddu) = jet.log_derivatives();
            let par = if i == 0 {
                ddu
            } else {
                libm::cos(beta) / libm::sin(beta) * du
            };
            for k in 0..grid.n_xi() {
                let point = crate::geometry::pointwise_frame(beta, grid.xi(k), jet.rho, [du, 0.0])?;
                nodes.push(NodeSample {
                    point,
                    hess: [ddu, 0.0, par],
                });
            }
        }
        Ok(SurfaceSample {
            grid,
            angle: spec.angle,
            nodes,
        })
    }

    /// Grid of the sample.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Contact angle.
    pub fn angle(&self) -> ContactAngle {
        self.angle
    }

    /// Per-node data.
    pub fn nodes(&self) -> &[NodeSample] {
        &self.nodes
    }

    /// Smallest `ρ`.
    pub fn min_rho(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.point.rho)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `ρ`.
    pub fn max_rho(&self) -> f64 {
        self.nodes.iter().map(|n| n.point.rho).fold(0.0, f64::max)
    }

    fn area_density(&self, p: &SurfacePoint) -> f64 {
        powi(p.rho * p.e_omega, self.grid.n() as u32) * p.v
    }

    /// `∫_Σ φ dA` for a per-node integrand.
    pub fn surface_integral(&self, mut phi: impl FnMut(&NodeSample) -> f64) -> f64 {
        let values: Vec<f64> = self
            .nodes
            .iter()
            .map(|node| phi(node) * self.area_density(&node.point))
            .collect();
        integrate_values(&self.grid, &values)
    }

    /// Hyperbolic area.
    pub fn area(&self) -> f64 {
        self.surface_integral(|_| 1.0)
    }

    /// Flat area enclosed by the boundary on the horosphere,
    /// `(1/n) ∮ ρ(π/2, ξ)ⁿ dξ`.
    pub fn wetted_area(&self) -> f64 {
        let n = self.grid.n();
        let e = self.grid.equator_row();
        let nx = self.grid.n_xi();
        let boundary = &self.nodes[e * nx..(e + 1) * nx];
        match self.grid.mode() {
            Mode::Axisymmetric => {
                self.grid.sphere_measure() * powi(boundary[0].point.rho, n as u32) / n as f64
            }
            Mode::Full2d => {
                boundary
                    .iter()
                    .map(|b| powi(b.point.rho, n as u32))
                    .sum::<f64>()
                    * self.grid.h_xi()
                    / n as f64
            }
        }
    }

    /// `Area − cos θ · Wet`.
    pub fn energy(&self) -> f64 {
        self.area() - self.angle.cos() * self.wetted_area()
    }

    /// `∫_{S^n_+} ∫_0^ρ sⁿ (1 + s cos β)^{−(n+1)} ds dσ`, the hyperbolic
    /// volume between the graph and the horosphere. The radial integral uses
    /// a 12-point Gauss–Legendre rule per node.
    pub fn enclosed_volume(&self) -> f64 {
        let rule = GaussLegendre::new(12);
        let n = self.grid.n() as u32;
        let trig = RowTrig::new(&self.grid);
        let nx = self.grid.n_xi();
        let values: Vec<f64> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(idx, node)| {
                let cb = trig.cos[idx / nx];
                rule.integrate(0.0, node.point.rho, |s| {
                    powi(s, n) / powi(1.0 + s * cb, n + 1)
                })
            })
            .collect();
        integrate_values(&self.grid, &values)
    }

    /// Normal speed at every node.
    pub fn speed_values(&self) -> Vec<f64> {
        let n = self.grid.n();
        self.nodes
            .iter()
            .map(|node| speed(&node.point, node.hess, n, self.angle))
            .collect()
    }

    /// `∫ (n/x_{n+1} − n cos θ ḡ(x,ν)) dA − ∫ H ḡ(X_{n+1},ν) dA`, which also
    /// equals `∫ f dA`.
    pub fn minkowski_residual(&self) -> f64 {
        let n = self.grid.n();
        let c = self.angle.cos();
        let nf = n as f64;
        let lhs = self.surface_integral(|node| {
            let s = support_functions(&node.point);
            nf * node.point.e_omega - nf * c * s.position
        });
        let rhs = self.surface_integral(|node| {
            let s = support_functions(&node.point);
            mean_curvature(&node.point, node.hess, n) * s.shifted
        });
        lhs - rhs
    }

    fn principal(&self, op: &'static str) -> Result<Vec<(f64, f64)>> {
        if self.grid.mode() != Mode::Axisymmetric {
            return Err(Error::AxisymmetricOnly(op));
        }
        Ok(self
            .nodes
            .iter()
            .map(|node| principal_curvatures_axisym(&node.point, node.hess))
            .collect())
    }

    /// Hyperbolic principal curvatures `(κ_β, κ_ξ)` per node.
    pub fn principal_curvatures(&self) -> Result<Vec<(f64, f64)>> {
        self.principal("principal_curvatures")
    }

    /// `∫ (1/x_{n+1} − cos θ ḡ(x,ν)) H dA − (2/(n−1)) ∫ σ₂ ḡ(X_{n+1},ν) dA`.
    pub fn sigma2_residual(&self) -> Result<f64> {
        let kappa = self.principal("sigma2_residual")?;
        let n = self.grid.n();
        let m = n as f64 - 1.0;
        let c = self.angle.cos();
        let mut it = kappa.iter();
        let lhs = self.surface_integral(|node| {
            let s = support_functions(&node.point);
            (node.point.e_omega - c * s.position) * mean_curvature(&node.point, node.hess, n)
        });
        let rhs = self.surface_integral(|node| {
            let (kb, kx) = *it.next().expect("one curvature pair per node");
            let sigma2 = m * kb * kx + 0.5 * m * (m - 1.0) * kx * kx;
            sigma2 * support_functions(&node.point).shifted
        });
        Ok(lhs - 2.0 / m * rhs)
    }

    /// `∫ Σ_{i<j} (κ_i − κ_j)² ḡ(X_{n+1},ν) dA`; for an axisymmetric graph
    /// the sum is `(n − 1)(κ_β − κ_ξ)²`.
    pub fn umbilicity_deficit(&self) -> Result<f64> {
        let kappa = self.principal("umbilicity_deficit")?;
        let m = self.grid.n() as f64 - 1.0;
        let mut it = kappa.iter();
        Ok(self.surface_integral(|node| {
            let (kb, kx) = *it.next().expect("one curvature pair per node");
            m * (kb - kx) * (kb - kx) * support_functions(&node.point).shifted
        }))
    }

    /// `∫ f H dA`, the energy dissipation rate along the flow.
    pub fn energy_rate(&self) -> f64 {
        let n = self.grid.n();
        let f = self.speed_values();
        let mut it = f.iter();
        self.surface_integral(|node| {
            *it.next().expect("one speed per node") * mean_curvature(&node.point, node.hess, n)
        })
    }
}

/// Hyperbolic area of a state.
pub fn area(state: &FlowState) -> Result<f64> {
    Ok(SurfaceSample::from_state(state)?.area())
}

/// Wetting area of a state.
pub fn wetted_area(state: &FlowState) -> Result<f64> {
    Ok(SurfaceSample::from_state(state)?.wetted_area())
}

/// Capillary energy of a state.
pub fn energy(state: &FlowState) -> Result<f64> {
    Ok(SurfaceSample::from_state(state)?.energy())
}

/// Enclosed hyperbolic volume of a state.
pub fn enclosed_volume(state: &FlowState) -> Result<f64> {
    Ok(SurfaceSample::from_state(state)?.enclosed_volume())
}

/// Weighted Minkowski residual of a state.
pub fn minkowski_residual(state: &FlowState) -> Result<f64> {
    Ok(SurfaceSample::from_state(state)?.minkowski_residual())
}

/// σ₂ identity residual of an axisymmetric state.
pub fn sigma2_residual(state: &FlowState) -> Result<f64> {
    SurfaceSample::from_state(state)?.sigma2_residual()
}

/// Umbilicity deficit of a sample.
pub fn umbilicity_deficit(sample: &SurfaceSample) -> Result<f64> {
    sample.umbilicity_deficit()
}

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    /// Step counter.
    pub step: u64,
    /// Flow time.
    pub t: f64,
    /// Size of the step that produced this state (0 initially).
    pub dt: f64,
    /// Enclosed hyperbolic volume.
    pub volume: f64,
    /// Hyperbolic area.
    pub area: f64,
    /// Wetting area.
    pub wet: f64,
    /// `area − cos θ · wet`.
    pub energy: f64,
    /// Weighted Minkowski residual.
    pub minkowski_residual: f64,
    /// σ₂ identity residual (of the ξ-averaged profile in 2-D).
    pub sigma2_residual: f64,
    /// Umbilicity deficit (of the ξ-averaged profile in 2-D).
    pub umbilicity_deficit: f64,
    /// Smallest `ρ`.
    pub rho_min: f64,
    /// Largest `ρ`.
    pub rho_max: f64,
    /// Least-squares cap radius.
    pub r_fit: f64,
    /// Smallest `ḡ(X_{n+1}, ν)`.
    pub min_shifted_support: f64,
    /// `sup |G|`.
    pub sup_rhs: f64,
}

/// Least-squares radius of the cap `C_{θ,r}` closest to the state in
/// `L²(dσ)`.
pub fn fit_radius(state: &FlowState) -> f64 {
    let grid = *state.grid();
    let w = grid.quadrature_weights();
    let (mut num, mut den) = (0.0, 0.0);
    for (idx, (w, u)) in w.iter().zip(state.u().values()).enumerate() {
        let q = unit_profile(state.angle(), grid.beta(idx / grid.n_xi()));
        num += w * exp(*u) * q;
        den += w * q * q;
    }
    num / den
}

/// Computes a diagnostics row for `state`, reusing an existing sample.
pub fn diagnostics_from_sample(
    state: &FlowState,
    sample: &SurfaceSample,
    step: u64,
    dt: f64,
    sup_rhs: f64,
) -> Result<DiagnosticsRecord> {
    let (sigma2, deficit) = match state.grid().mode() {
        Mode::Axisymmetric => (sample.sigma2_residual()?, sample.umbilicity_deficit()?),
        Mode::Full2d => {
            let axis = SurfaceSample::from_state(&state.xi_averaged()?)?;
            (axis.sigma2_residual()?, axis.umbilicity_deficit()?)
        }
    };
    let area = sample.area();
    let wet = sample.wetted_area();
    Ok(DiagnosticsRecord {
        step,
        t: state.t(),
        dt,
        volume: sample.enclosed_volume(),
        area,
        wet,
        energy: area - state.angle().cos() * wet,
        minkowski_residual: sample.minkowski_residual(),
        sigma2_residual: sigma2,
        umbilicity_deficit: deficit,
        rho_min: sample.min_rho(),
        rho_max: sample.max_rho(),
        r_fit: fit_radius(state),
        min_shifted_support: sample
            .nodes()
            .iter()
            .map(|n| support_functions(&n.point).shifted)
            .fold(f64::INFINITY, f64::min),
        sup_rhs,
    })
}

/// Diagnostics row for `state`.
pub fn diagnostics(state: &FlowState, step: u64, dt: f64) -> Result<DiagnosticsRecord> {
    let sample = SurfaceSample::from_state(state)?;
    let sup = crate::flow::rhs_from_sample(&sample).sup_norm();
    diagnostics_from_sample(state, &sample, step, dt, sup)
}

/// Convenience: a field of `f` values for a state.
pub fn speed_of(state: &FlowState) -> Result<Field> {
    let sample = SurfaceSample::from_state(state)?;
    Field::new(*state.grid(), sample.speed_values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn cap(c: f64, r: f64) -> CapSpec {
        CapSpec::new(ContactAngle::from_cos(c).unwrap(), r, 2).unwrap()
    }

    fn axis(nb: usize) -> GridSpec {
        GridSpec::axisymmetric(2, nb).unwrap()
    }

    #[test]
    fn free_cap_area_and_wet() {
        for r in [1.0, 2.0] {
            let s = cap(0.0, r).state(axis(257)).unwrap();
            let a = area(&s).unwrap();
            let exact = 2.0 * PI * r * r / (1.0 + r);
            assert!((a - exact).abs() < 1e-4 * exact, "{a} {exact}");
            assert!((energy(&s).unwrap() - a).abs() < 1e-15);
        }
        let s = cap(0.0, 1.0).state(axis(33)).unwrap();
        assert!((wetted_area(&s).unwrap() - PI).abs() < 1e-14);
        let s = cap(0.5, 1.0).state(axis(33)).unwrap();
        assert!((wetted_area(&s).unwrap() - PI * 0.75).abs() < 1e-14);
    }

    #[test]
    fn area_error_quarters_under_refinement() {
        let exact = PI;
        let e: Vec<f64> = [33, 65, 129]
            .iter()
            .map(|&nb| (area(&cap(0.0, 1.0).state(axis(nb)).unwrap()).unwrap() - exact).abs())
            .collect();
        assert!(e[0] / e[1] > 3.8 && e[1] / e[2] > 3.8, "{e:?}");
    }

    #[test]
    fn free_cap_minkowski_residual_is_exact() {
        let s = cap(0.0, 1.4).state(axis(65)).unwrap();
        assert!(minkowski_residual(&s).unwrap().abs() < 1e-13);
    }

    #[test]
    fn analytic_cap_residuals_vanish() {
        for (c, r) in [(0.5, 1.0), (-0.5, 0.5), (0.3, 2.0)] {
            let sample = SurfaceSample::from_cap(&cap(c, r), axis(65)).unwrap();
            assert!(sample.minkowski_residual().abs() < 1e-12);
            assert!(sample.sigma2_residual().unwrap().abs() < 1e-12);
            assert!(sample.umbilicity_deficit().unwrap() < 1e-24);
        }
    }

    #[test]
    fn energy_combination_is_exact() {
        let s = cap(0.5, 1.0).state(axis(65)).unwrap();
        let d = diagnostics(&s, 0, 0.0).unwrap();
        assert_eq!(d.energy, d.area - 0.5 * d.wet);
    }

    #[test]
    fn volume_grows_with_radius_and_matches_cap_volume() {
        let mut prev = 0.0;
        for r in [0.5, 1.0, 1.5] {
            let spec = cap(0.5, r);
            let v = enclosed_volume(&spec.state(axis(257)).unwrap()).unwrap();
            let exact = crate::umbilical::cap_volume(&spec);
            assert!((v - exact).abs() < 1e-4 * exact);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn sigma2_and_deficit_refuse_full2d() {
        let g = GridSpec::full2d(17, 16).unwrap();
        let s = cap(0.0, 1.0).state(g).unwrap();
        let sample = SurfaceSample::from_state(&s).unwrap();
        assert!(matches!(
            sample.sigma2_residual(),
            Err(Error::AxisymmetricOnly(_))
        ));
        assert!(sample.umbilicity_deficit().is_err());
    }

    #[test]
    fn perturbed_cap_has_positive_deficit() {
        let spec = cap(0.5, 1.0);
        let g = axis(65);
        let u = Field::from_fn(g, |b, _| {
            crate::math::ln(spec.profile_rho(b) * (1.0 + 0.05 * libm::cos(2.0 * b)))
        });
        let s = FlowState::new(u, spec.angle).unwrap();
        let sample = SurfaceSample::from_state(&s).unwrap();
        assert!(sample.umbilicity_deficit().unwrap() > 1e-6);
    }

    #[test]
    fn full2d_wet_matches_axisymmetric() {
        let spec = cap(0.0, 1.2);
        let a = SurfaceSample::from_state(&spec.state(axis(33)).unwrap()).unwrap();
        let f = SurfaceSample::from_state(&spec.state(GridSpec::full2d(33, 16).unwrap()).unwrap())
            .unwrap();
        assert!((a.wetted_area() - f.wetted_area()).abs() < 1e-13);
        assert!((a.area() - f.area()).abs() < 1e-12);
        assert!((a.enclosed_volume() - f.enclosed_volume()).abs() < 1e-12);
    }
}
