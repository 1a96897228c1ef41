//! Pointwise hyperbolic geometry of a radial graph `x = E_{n+1} + ρ z`.
//!
//! The unit normal is fixed as the ρ-increasing one; in the Euclidean model
//! it is `ν_δ = (∂_ρ − ρ⁻¹ ∇u) / v`, and the hyperbolic unit normal is
//! `ν = x_{n+1} ν_δ`. All formulas below take the frame derivatives produced
//! by [`crate::grid::differentiate`] (or their analytic counterparts).

use crate::math::{cos, ln, sin, sqrt};
use crate::{Error, Result};

/// Contact angle θ ∈ (0, π), stored through its cosine and sine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactAngle {
    cos: f64,
    sin: f64,
}

impl ContactAngle {
    /// From `cos θ ∈ (−1, 1)`.
    pub fn from_cos(c: f64) -> Result<Self> {
        if !(c > -1.0 && c < 1.0) {
            return Err(Error::InvalidAngle(c));
        }
        Ok(ContactAngle {
            cos: c,
            sin: sqrt(1.0 - c * c),
        })
    }

    /// From θ in radians.
    pub fn from_radians(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < core::f64::consts::PI) {
            return Err(Error::InvalidAngle(cos(theta)));
        }
        Ok(ContactAngle {
            cos: cos(theta),
            sin: sin(theta),
        })
    }

    /// The free-boundary angle π/2.
    pub fn right() -> Self {
        ContactAngle { cos: 0.0, sin: 1.0 }
    }

    /// `cos θ`.
    pub fn cos(&self) -> f64 {
        self.cos
    }

    /// `sin θ`.
    pub fn sin(&self) -> f64 {
        self.sin
    }

    /// `cot θ`, the axisymmetric equator slope of `u`.
    pub fn cot(&self) -> f64 {
        self.cos / self.sin
    }

    /// θ in radians.
    pub fn radians(&self) -> f64 {
        libm::atan2(self.sin, self.cos)
    }
}

/// Pointwise geometric bundle of a radial graph (no second derivatives).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    /// Polar angle β.
    pub beta: f64,
    /// Longitude ξ (0 in axisymmetric mode).
    pub xi: f64,
    /// `sin β`.
    pub sin_beta: f64,
    /// `cos β`.
    pub cos_beta: f64,
    /// Euclidean distance from `E_{n+1}`.
    pub rho: f64,
    /// `log ρ`.
    pub u: f64,
    /// Frame gradient `[∇_β u, ∇_ξ u / sin β]`.
    pub grad: [f64; 2],
    /// `|∇u|²`.
    pub grad_sq: f64,
    /// `√(1 + |∇u|²)`.
    pub v: f64,
    /// Height `x_{n+1} = ρ cos β + 1`.
    pub height: f64,
    /// Conformal factor `e^ω = 1 / x_{n+1}`.
    pub e_omega: f64,
}

impl SurfacePoint {
    /// Coefficients of the Euclidean outward normal along `∂_ρ` and along the
    /// two frame directions: `(1/v, −∇u/(ρ v))`.
    pub fn normal_coefficients(&self) -> (f64, [f64; 2]) {
        let a = 1.0 / self.v;
        let b = -1.0 / (self.rho * self.v);
        (a, [b * self.grad[0], b * self.grad[1]])
    }

    /// `(cos β + sin β ∇_β u) / v`, the Euclidean normal derivative of
    /// `x_{n+1}`, equal to `⟨E_{n+1}, ν_δ⟩`.
    pub fn height_normal_derivative(&self) -> f64 {
        (self.cos_beta + self.sin_beta * self.grad[0]) / self.v
    }
}

/// Builds the first-order bundle at a node; `grad` is in the orthonormal
/// frame (use `[u_β, u_ξ / sin β]`).
pub fn pointwise_frame(beta: f64, xi: f64, rho: f64, grad: [f64; 2]) -> Result<SurfacePoint> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::StarShapednessLost {
            node: 0,
            beta,
            value: rho,
        });
    }
    let grad_sq = grad[0] * grad[0] + grad[1] * grad[1];
    let (sin_beta, cos_beta) = (sin(beta), cos(beta));
    let height = rho * cos_beta + 1.0;
    Ok(SurfacePoint {
        beta,
        xi,
        sin_beta,
        cos_beta,
        rho,
        u: ln(rho),
        grad,
        grad_sq,
        v: sqrt(1.0 + grad_sq),
        height,
        e_omega: 1.0 / height,
    })
}

/// Support functions with respect to the (conformal) Killing fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportTriple {
    /// `ḡ(X_{n+1}, ν)` with `X_{n+1} = x − E_{n+1}`; positive iff star-shaped.
    pub shifted: f64,
    /// `ḡ(E_{n+1}, ν)`.
    pub vertical: f64,
    /// `ḡ(x, ν)`.
    pub position: f64,
}

/// `ḡ(X_{n+1},ν) = ρ e^ω / v`, `ḡ(E_{n+1},ν) = e^ω (cos β + sin β ∇_β u) / v`
/// and their sum `ḡ(x,ν)`.
pub fn support_functions(p: &SurfacePoint) -> SupportTriple {
    let shifted = p.rho * p.e_omega / p.v;
    let vertical = p.e_omega * p.height_normal_derivative();
    SupportTriple {
        shifted,
        vertical,
        position: shifted + vertical,
    }
}

/// `Σ (σ^{ij} − u^i u^j / v²) u_{ij}` from frame Hessian entries
/// `[h_ββ, h_βξ, h_ξξ]`, with `h_ξξ` repeated over `n − 1` parallel directions.
pub fn hessian_contraction(p: &SurfacePoint, hess: [f64; 3], n: usize) -> f64 {
    let [g1, g2] = p.grad;
    let trace = hess[0] + (n as f64 - 1.0) * hess[2];
    let quad = g1 * g1 * hess[0] + 2.0 * g1 * g2 * hess[1] + g2 * g2 * hess[2];
    trace - quad / (p.v * p.v)
}

/// Hyperbolic mean curvature with respect to the outward normal:
/// `H = −A/(ρ v e^ω) + n/(ρ v) − n sin β ∇_β u / v`, `A` the contraction above.
pub fn mean_curvature(p: &SurfacePoint, hess: [f64; 3], n: usize) -> f64 {
    let nf = n as f64;
    let a = hessian_contraction(p, hess, n);
    -a * p.height / (p.rho * p.v) + nf / (p.rho * p.v) - nf * p.sin_beta * p.grad[0] / p.v
}

/// Hyperbolic principal curvatures `(κ_β, κ_ξ)` of an axisymmetric graph;
/// `κ_ξ` has multiplicity `n − 1`.
///
/// Euclidean meridian and parallel curvatures `(1 − u_ββ/v²)/(ρ v)` and
/// `(1 − cot β u_β)/(ρ v)` are converted by `κ̄ = x_{n+1} κ − ⟨E_{n+1}, ν_δ⟩`.
/// At the pole the parallel entry of `hess` already holds the meridian limit.
pub fn principal_curvatures_axisym(p: &SurfacePoint, hess: [f64; 3]) -> (f64, f64) {
    let rv = p.rho * p.v;
    let meridian = (1.0 - hess[0] / (p.v * p.v)) / rv;
    let parallel = (1.0 - hess[2]) / rv;
    let shift = p.height_normal_derivative();
    (p.height * meridian - shift, p.height * parallel - shift)
}

/// Normal speed `f = n/x_{n+1} − n cos θ ḡ(x,ν) − H ḡ(X_{n+1},ν)`.
pub fn speed(p: &SurfacePoint, hess: [f64; 3], n: usize, angle: ContactAngle) -> f64 {
    let s = support_functions(p);
    let nf = n as f64;
    nf * p.e_omega - nf * angle.cos() * s.position - mean_curvature(p, hess, n) * s.shifted
}

/// Right-hand side of `∂_t u = G`:
/// `G = A/(ρ e^ω v) + n|∇u|²/(ρ v) + n sin β ∇_β u / v
///      − (n cos θ / ρ)(ρ + cos β + sin β ∇_β u)`.
pub fn scalar_rhs(p: &SurfacePoint, hess: [f64; 3], n: usize, angle: ContactAngle) -> f64 {
    let nf = n as f64;
    let a = hessian_contraction(p, hess, n);
    let (sb, cb) = (p.sin_beta, p.cos_beta);
    let g1 = p.grad[0];
    a * p.height / (p.rho * p.v) + nf * p.grad_sq / (p.rho * p.v) + nf * sb * g1 / p.v
        - nf * angle.cos() / p.rho * (p.rho + cb + sb * g1)
}
