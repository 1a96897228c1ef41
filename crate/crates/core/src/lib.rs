//! Numerical core for the volume-preserving, energy-decreasing capillary flow
//! of radial graphs in a horoball of the upper half-space model of hyperbolic
//! space.
//!
//! A star-shaped hypersurface with respect to `E_{n+1}` is written as the
//! radial graph `x = E_{n+1} + ρ(z) z` over the unit half-sphere
//! `S^n_+(E_{n+1})`, with polar angle `β ∈ [0, π/2]` measured from the vertical
//! and `x_{n+1} = ρ cos β + 1`. The unknown evolved in time is `u = log ρ`.
//!
//! The crate is `no_std` (with `alloc`) and contains no IO. Module map:
//!
//! * [`grid`]: half-sphere discretisation, finite differences with pole and
//!   capillary ghost nodes, quadrature against the round measure.
//! * [`geometry`]: pointwise hyperbolic geometry of a radial graph.
//! * [`flow`]: the scalar right-hand side, explicit stepping, barriers.
//! * [`functionals`]: volume, area, energy and identity residuals.
//! * [`umbilical`]: the closed-form static caps `C_{θ,r}(E_{n+1})`.
//! * [`quadrature`]: Gauss–Legendre rules.
//! * [`oracle`]: independent quadrature, order estimation and curvature checks.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;

mod error;
mod math;

pub mod flow;
pub mod functionals;
pub mod geometry;
pub mod grid;
pub mod oracle;
pub mod quadrature;
pub mod umbilical;

pub use error::Error;
pub use flow::{FlowConfig, FlowState, RunOutcome, RunStatus, StepReport};
pub use functionals::DiagnosticsRecord;
pub use geometry::ContactAngle;
pub use grid::{Field, GridSpec, Mode};
pub use umbilical::CapSpec;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Upper bound on `|cos θ|` under which convergence of the flow is known,
/// `(3n + 1) / (5n − 1)`. Larger angles are still accepted by the solver.
pub fn cos_theta_threshold(n: usize) -> f64 {
    let n = n as f64;
    (3.0 * n + 1.0) / (5.0 * n - 1.0)
}
