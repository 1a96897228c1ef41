//! Discretisation of the half-sphere `S^n_+(E_{n+1})`.
//!
//! Nodes sit on a uniform latitude grid `β_i = i h_β`, `i = 0..N_β`, from the
//! pole (`β = 0`) to the equator (`β = π/2`). In [`Mode::Full2d`] (only `n = 2`)
//! each latitude carries `N_ξ` periodic longitude nodes; the pole ring is a
//! single geometric point stored `N_ξ` times.
//!
//! Derivatives are second-order centred differences evaluated on a
//! [`Ghosted`] copy of a field with one ghost row beyond each end. The pole
//! ghost comes from smoothness (even reflection, or the antipodal ring in
//! 2-D). The equator ghost either extends a known function or enforces the
//! capillary relation `∇_β u = cos θ · v`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::geometry::ContactAngle;
use crate::math::{cos, powi, sin, sqrt, tgamma};
use crate::{Error, Result};

/// Smallest admissible node count along β (and ξ).
pub const MIN_NODES: usize = 8;

/// Layout of the discrete domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Fields depend on β only; any `n ≥ 2`.
    Axisymmetric,
    /// Fields depend on `(β, ξ)`; `n = 2` only.
    Full2d,
}

/// Grid parameters. Value type; cheap to copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    mode: Mode,
    n_beta: usize,
    n_xi: usize,
    h_beta: f64,
    h_xi: f64,
}

impl GridSpec {
    /// Builds a grid. `n_xi` is ignored in axisymmetric mode.
    pub fn new(n: usize, mode: Mode, n_beta: usize, n_xi: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid("dimension n must be at least 2"));
        }
        if n_beta < MIN_NODES {
            return Err(Error::InvalidGrid("n_beta must be at least 8"));
        }
        let n_xi = match mode {
            Mode::Axisymmetric => 1,
            Mode::Full2d => {
                if n != 2 {
                    return Err(Error::InvalidGrid("full2d mode requires n = 2"));
                }
                if n_xi < MIN_NODES {
                    return Err(Error::InvalidGrid("n_xi must be at least 8"));
                }
                if n_xi % 2 != 0 {
                    return Err(Error::InvalidGrid(
                        "n_xi must be even (antipodal pole reflection)",
                    ));
                }
                n_xi
            }
        };
        Ok(GridSpec {
            n,
            mode,
            n_beta,
            n_xi,
            h_beta: FRAC_PI_2 / (n_beta - 1) as f64,
            h_xi: 2.0 * PI / n_xi as f64,
        })
    }

    /// Axisymmetric grid shorthand.
    pub fn axisymmetric(n: usize, n_beta: usize) -> Result<Self> {
        Self::new(n, Mode::Axisymmetric, n_beta, 1)
    }

    /// Two-dimensional grid shorthand (`n = 2`).
    pub fn full2d(n_beta: usize, n_xi: usize) -> Result<Self> {
        Self::new(2, Mode::Full2d, n_beta, n_xi)
    }

    /// Same layout with a different β resolution.
    pub fn with_n_beta(&self, n_beta: usize) -> Result<Self> {
        Self::new(self.n, self.mode, n_beta, self.n_xi)
    }

    /// Hypersurface dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid layout.
    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Node count along β.
    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    /// Node count along ξ (1 in axisymmetric mode).
    pub fn n_xi(&self) -> usize {
        self.n_xi
    }

    /// β spacing `(π/2)/(N_β − 1)`.
    pub fn h_beta(&self) -> f64 {
        self.h_beta
    }

    /// ξ spacing `2π/N_ξ`.
    pub fn h_xi(&self) -> f64 {
        self.h_xi
    }

    /// Total number of stored nodes.
    pub fn len(&self) -> usize {
        self.n_beta * self.n_xi
    }

    /// Always false; grids have at least eight nodes.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Polar angle of row `i`. The last row is exactly `π/2`.
    pub fn beta(&self, i: usize) -> f64 {
        if i + 1 == self.n_beta {
            FRAC_PI_2
        } else {
            i as f64 * self.h_beta
        }
    }

    /// Longitude of column `k`.
    pub fn xi(&self, k: usize) -> f64 {
        k as f64 * self.h_xi
    }

    /// Flat index of node `(i, k)`.
    #[inline]
    pub fn index(&self, i: usize, k: usize) -> usize {
        i * self.n_xi + k
    }

    /// Row and column of a flat index.
    #[inline]
    pub fn row_col(&self, idx: usize) -> (usize, usize) {
        (idx / self.n_xi, idx % self.n_xi)
    }

    /// Index of the equator row.
    pub fn equator_row(&self) -> usize {
        self.n_beta - 1
    }

    /// `|S^{n−1}| = 2 π^{n/2} / Γ(n/2)`, with the exact values `2π` and `4π`
    /// for `n = 2, 3`.
    pub fn sphere_measure(&self) -> f64 {
        sphere_measure(self.n)
    }

    /// Trapezoid weights in β, including `sin^{n−1} β` and the ξ factor, so
    /// that `Σ w_j f_j ≈ ∫_{S^n_+} f dσ`.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.len()];
        let ring = match self.mode {
            Mode::Axisymmetric => self.sphere_measure(),
            Mode::Full2d => self.h_xi,
        };
        for i in 0..self.n_beta {
            let end = if i == 0 || i + 1 == self.n_beta {
                0.5
            } else {
                1.0
            };
            let wi = end * self.h_beta * powi(sin(self.beta(i)), self.n as u32 - 1) * ring;
            for k in 0..self.n_xi {
                w[self.index(i, k)] = wi;
            }
        }
        w
    }

    /// Largest ring index below which [`polar_filter`] is active (exclusive),
    /// i.e. rings whose longitude spacing `sin β · h_ξ` is finer than `h_β`.
    pub fn filtered_rings(&self) -> usize {
        if self.mode == Mode::Axisymmetric {
            return 0;
        }
        (1..self.n_beta)
            .find(|&i| sin(self.beta(i)) * self.h_xi >= self.h_beta)
            .unwrap_or(self.n_beta)
    }

    /// Effective mesh width used by the explicit time-step bound.
    pub fn stability_width(&self) -> f64 {
        match self.mode {
            Mode::Axisymmetric => self.h_beta,
            Mode::Full2d => {
                let first = self.filtered_rings().max(1);
                let unfiltered = (first..self.n_beta)
                    .map(|i| sin(self.beta(i)) * self.h_xi)
                    .fold(f64::INFINITY, f64::min);
                self.h_beta.min(unfiltered)
            }
        }
    }
}

/// `|S^{m−1}|`, the measure of the unit `(m−1)`-sphere.
pub fn sphere_measure(m: usize) -> f64 {
    match m {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => {
            let half = m as f64 / 2.0;
            2.0 * libm::pow(PI, half) / tgamma(half)
        }
    }
}

/// A real value at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    /// Wraps raw node values (row-major, β outer).
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument("field length does not match grid"));
        }
        let field = Field { grid, values };
        field.check_finite()?;
        Ok(field)
    }

    /// Wraps values without the finiteness check; callers check before use.
    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    /// Samples `f(β, ξ)` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_beta {
            let beta = grid.beta(i);
            for k in 0..grid.n_xi {
                values.push(f(beta, grid.xi(k)));
            }
        }
        Field { grid, values }
    }

    /// Constant field.
    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Field {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Grid the field lives on.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Node values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mutable node values.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Consumes the field.
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at node `(i, k)`.
    #[inline]
    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.values[self.grid.index(i, k)]
    }

    /// Errors on the first NaN or infinity.
    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(node) => Err(Error::NonFinite { node }),
            None => Ok(()),
        }
    }

    /// Maximum absolute value.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest spread `max_k − min_k` over the rows.
    pub fn xi_variation(&self) -> f64 {
        let mut worst = 0.0f64;
        for row in self.values.chunks(self.grid.n_xi) {
            let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max(hi - lo);
        }
        worst
    }

    /// Row averages over ξ as an axisymmetric field with the same `n_beta`.
    pub fn xi_average(&self) -> Field {
        let grid = GridSpec {
            mode: Mode::Axisymmetric,
            n_xi: 1,
            h_xi: 2.0 * PI,
            ..self.grid
        };
        let values = self
            .values
            .chunks(self.grid.n_xi)
            .map(|row| row.iter().sum::<f64>() / row.len() as f64)
            .collect();
        Field { grid, values }
    }
}

/// `∫_{S^n_+} f dσ` by the composite trapezoid rule in β (and ξ).
pub fn integrate(f: &Field) -> Result<f64> {
    f.check_finite()?;
    Ok(integrate_values(&f.grid, &f.values))
}

pub(crate) fn integrate_values(grid: &GridSpec, values: &[f64]) -> f64 {
    let w = grid.quadrature_weights();
    w.iter().zip(values).map(|(w, f)| w * f).sum()
}

/// How the equator derivative closure is formed.
#[derive(Debug, Clone, PartialEq)]
enum EquatorClosure {
    /// Ghost row holds genuine extension values; use centred stencils.
    Extension,
    /// Ghost row encodes a prescribed normal derivative (one per column);
    /// the second β-derivative uses a one-sided stencil consistent with it.
    Prescribed(Vec<f64>),
}

/// A field padded with one ghost row at the pole side and one beyond the
/// equator. Row `r` of the padded storage is grid row `r − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ghosted {
    grid: GridSpec,
    padded: Vec<f64>,
    equator: EquatorClosure,
}

impl Ghosted {
    fn pad(field: &Field) -> Self {
        let g = field.grid;
        let mut padded = vec![0.0; (g.n_beta + 2) * g.n_xi];
        padded[g.n_xi..(g.n_beta + 1) * g.n_xi].copy_from_slice(&field.values);
        let mut out = Ghosted {
            grid: g,
            padded,
            equator: EquatorClosure::Extension,
        };
        out.fill_pole_ghost();
        out
    }

    fn fill_pole_ghost(&mut self) {
        let nx = self.grid.n_xi;
        for k in 0..nx {
            // Row −1 is the ring at β = h, seen from across the pole.
            let src = match self.grid.mode {
                Mode::Axisymmetric => k,
                Mode::Full2d => (k + nx / 2) % nx,
            };
            self.padded[k] = self.padded[2 * nx + src];
        }
    }

    /// Pads `field`, taking the equator ghost row from a known extension
    /// `f(β, ξ)` evaluated at `β = π/2 + h_β`.
    pub fn with_extension(field: &Field, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::pad(field);
        let g = out.grid;
        let beta = FRAC_PI_2 + g.h_beta;
        for k in 0..g.n_xi {
            out.padded[(g.n_beta + 1) * g.n_xi + k] = f(beta, g.xi(k));
        }
        out
    }

    /// Value at grid row `i` (may be −1 or `N_β`) and column `k` (periodic).
    #[inline]
    pub fn get(&self, i: isize, k: isize) -> f64 {
        let nx = self.grid.n_xi as isize;
        let kk = if k < 0 {
            k + nx
        } else if k >= nx {
            k - nx
        } else {
            k
        } as usize;
        self.padded[(i + 1) as usize * self.grid.n_xi + kk]
    }

    /// Grid of the underlying field.
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Centred β-difference at the equator, per column.
    pub fn equator_slope(&self) -> Vec<f64> {
        let e = self.grid.equator_row() as isize;
        (0..self.grid.n_xi as isize)
            .map(|k| (self.get(e + 1, k) - self.get(e - 1, k)) / (2.0 * self.grid.h_beta))
            .collect()
    }
}

/// Populates the ghost rows of `u = log ρ` for contact angle θ.
///
/// The equator ghost makes the centred difference of `∇_β u` equal the
/// closed-form solution of `∇_β u = cos θ · √(1 + |∇u|²)` at `β = π/2`:
/// `cot θ` in axisymmetric mode, `cot θ · √(1 + (∇_ξ u)²)` in 2-D.
pub fn apply_capillary_ghost(u: &Field, angle: ContactAngle) -> Result<Ghosted> {
    u.check_finite()?;
    let mut out = Ghosted::pad(u);
    let g = out.grid;
    let e = g.equator_row();
    let nx = g.n_xi;
    let slope = angle.cot();
    let mut prescribed = Vec::with_capacity(nx);
    for k in 0..nx {
        let d_beta = match g.mode {
            Mode::Axisymmetric => slope,
            Mode::Full2d => {
                let d_xi = (u.at(e, (k + 1) % nx) - u.at(e, (k + nx - 1) % nx)) / (2.0 * g.h_xi);
                slope * sqrt(1.0 + d_xi * d_xi)
            }
        };
        out.padded[(e + 2) * nx + k] = u.at(e - 1, k) + 2.0 * g.h_beta * d_beta;
        prescribed.push(d_beta);
    }
    out.equator = EquatorClosure::Prescribed(prescribed);
    Ok(out)
}

/// Derivative data at one node.
///
/// Raw coordinate derivatives are kept alongside the same quantities in the
/// orthonormal frame `(e_β, e_ξ / sin β)`, where the covariant Hessian of the
/// round metric includes the Christoffel corrections. In axisymmetric mode
/// `hess[2]` is the common value for each of the `n − 1` parallel directions
/// (`cot β · u_β`, or `u_ββ` at the pole).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    /// `∂_β f`.
    pub d_beta: f64,
    /// `∂_ξ f`.
    pub d_xi: f64,
    /// `∂²_β f`.
    pub d_beta_beta: f64,
    /// `∂²_ξ f`.
    pub d_xi_xi: f64,
    /// `∂_β ∂_ξ f`.
    pub d_beta_xi: f64,
    /// Frame gradient `[f_β, f_ξ / sin β]`.
    pub grad: [f64; 2],
    /// Frame Hessian `[H_ββ, H_βξ, H_ξξ]`.
    pub hess: [f64; 3],
    /// `σ^{ij} f_{ij}`, the Laplace–Beltrami operator.
    pub trace: f64,
}

/// `sin β_i` and `cos β_i` per row, cached for hot loops.
#[derive(Debug, Clone, PartialEq)]
pub struct RowTrig {
    /// `sin β_i`.
    pub sin: Vec<f64>,
    /// `cos β_i`.
    pub cos: Vec<f64>,
}

impl RowTrig {
    /// Tabulates the rows of `grid`.
    pub fn new(grid: &GridSpec) -> Self {
        let (sin, cos) = (0..grid.n_beta)
            .map(|i| {
                let b = grid.beta(i);
                (sin(b), cos(b))
            })
            .unzip();
        RowTrig { sin, cos }
    }
}

/// Second-order finite-difference derivatives at every node.
pub fn differentiate(f: &Ghosted) -> Result<Vec<Jet>> {
    differentiate_with(f, &RowTrig::new(&f.grid))
}

/// [`differentiate`] with a precomputed row table.
pub fn differentiate_with(f: &Ghosted, trig: &RowTrig) -> Result<Vec<Jet>> {
    if let Some(node) = f.padded.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            node: node.saturating_sub(f.grid.n_xi),
        });
    }
    let g = f.grid;
    let (h, hx) = (g.h_beta, g.h_xi);
    let n = g.n as f64;
    let e = g.equator_row();
    let mut out = Vec::with_capacity(g.len());
    for i in 0..g.n_beta {
        let (s, c) = (trig.sin[i], trig.cos[i]);
        let ii = i as isize;
        for k in 0..g.n_xi {
            let kk = k as isize;
            let f0 = f.get(ii, kk);
            let d_beta = (f.get(ii + 1, kk) - f.get(ii - 1, kk)) / (2.0 * h);
            let mut d_beta_beta = (f.get(ii + 1, kk) - 2.0 * f0 + f.get(ii - 1, kk)) / (h * h);
            if i == e {
                if let EquatorClosure::Prescribed(slope) = &f.equator {
                    d_beta_beta = (8.0 * f.get(ii - 1, kk) - f.get(ii - 2, kk) - 7.0 * f0
                        + 6.0 * h * slope[k])
                        / (2.0 * h * h);
                }
            }
            let mut jet = Jet {
                d_beta,
                d_beta_beta,
                ..Jet::default()
            };
            match g.mode {
                Mode::Axisymmetric => {
                    let par = if i == 0 { d_beta_beta } else { c / s * d_beta };
                    jet.grad = [d_beta, 0.0];
                    jet.hess = [d_beta_beta, 0.0, par];
                    jet.trace = d_beta_beta + (n - 1.0) * par;
                }
                Mode::Full2d => {
                    if i == 0 {
                        // Directional data along the meridian ξ; the trace is
                        // the mean curvature of f over all directions.
                        jet.grad = [d_beta, 0.0];
                        jet.hess[0] = d_beta_beta;
                    } else {
                        let d_xi = (f.get(ii, kk + 1) - f.get(ii, kk - 1)) / (2.0 * hx);
                        let d_xi_xi =
                            (f.get(ii, kk + 1) - 2.0 * f0 + f.get(ii, kk - 1)) / (hx * hx);
                        let d_beta_xi =
                            (f.get(ii + 1, kk + 1) - f.get(ii + 1, kk - 1) - f.get(ii - 1, kk + 1)
                                + f.get(ii - 1, kk - 1))
                                / (4.0 * h * hx);
                        jet.d_xi = d_xi;
                        jet.d_xi_xi = d_xi_xi;
                        jet.d_beta_xi = d_beta_xi;
                        jet.grad = [d_beta, d_xi / s];
                        let h12 = (d_beta_xi - c / s * d_xi) / s;
                        let h22 = d_xi_xi / (s * s) + c / s * d_beta;
                        jet.hess = [d_beta_beta, h12, h22];
                        jet.trace = d_beta_beta + h22;
                    }
                }
            }
            out.push(jet);
        }
    }
    if g.mode == Mode::Full2d {
        let mean_dir = out[..g.n_xi].iter().map(|j| j.hess[0]).sum::<f64>() / g.n_xi as f64;
        let trace = n * mean_dir;
        for jet in &mut out[..g.n_xi] {
            jet.trace = trace;
            jet.hess[2] = trace - jet.hess[0];
        }
    }
    Ok(out)
}

/// Removes longitudinal Fourier modes that the latitude spacing cannot
/// resolve on rings near the pole (`sin β · h_ξ < h_β`).
///
/// Mode `k` survives on ring `i` when its discrete ξ-Laplacian eigenvalue
/// `4 sin²(k h_ξ / 2) / (sin β_i h_ξ)²` does not exceed `4 / h_β²`. The pole
/// ring is left to [`average_pole`].
pub fn polar_filter(field: &mut Field) {
    let g = field.grid;
    if g.mode != Mode::Full2d {
        return;
    }
    let nx = g.n_xi;
    let half = nx / 2;
    let table: Vec<(f64, f64)> = (0..nx)
        .map(|m| {
            let a = 2.0 * PI * m as f64 / nx as f64;
            (cos(a), sin(a))
        })
        .collect();
    let mut coef = vec![(0.0, 0.0); half + 1];
    for i in 1..g.filtered_rings() {
        let bound = sin(g.beta(i)) * g.h_xi / g.h_beta;
        let kmax = (0..=half)
            .take_while(|&k| sin(k as f64 * g.h_xi / 2.0) <= bound)
            .last()
            .unwrap_or(0);
        if kmax == half {
            continue;
        }
        let row = &mut field.values[i * nx..(i + 1) * nx];
        for (k, ck) in coef.iter_mut().enumerate().take(kmax + 1) {
            let (mut a, mut b) = (0.0, 0.0);
            let mut m = 0;
            for v in row.iter() {
                let (cs, sn) = table[m];
                a += v * cs;
                b += v * sn;
                m += k;
                if m >= nx {
                    m -= nx;
                }
            }
            *ck = (a, b);
        }
        let scale = 2.0 / nx as f64;
        for (j, v) in row.iter_mut().enumerate() {
            let mut acc = 0.5 * scale * coef[0].0;
            let mut m = 0;
            for &(a, b) in &coef[1..=kmax] {
                m += j;
                if m >= nx {
                    m -= nx;
                }
                let (cs, sn) = table[m];
                acc += scale * (a * cs + b * sn);
            }
            *v = acc;
        }
    }
}

/// Sets the pole ring of a 2-D field to the ξ-average of the adjacent ring.
pub fn average_pole(field: &mut Field) {
    let g = field.grid;
    if g.mode != Mode::Full2d {
        return;
    }
    let nx = g.n_xi;
    let mean = field.values[nx..2 * nx].iter().sum::<f64>() / nx as f64;
    field.values[..nx].fill(mean);
}
