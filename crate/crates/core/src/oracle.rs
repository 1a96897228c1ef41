//! Checks that do not share code paths with the solver: adaptive quadrature,
//! observed convergence order, and mean curvature of an axisymmetric profile
//! computed from its Euclidean meridian curve.

use alloc::vec::Vec;

use crate::geometry::ContactAngle;
use crate::grid::{sphere_measure, GridSpec};
use crate::math::{cos, log2, powi, sin, sqrt};
use crate::umbilical::unit_profile;

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod(a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = K_WEIGHTS[7] * fc;
    let mut gauss = G_WEIGHTS[3] * fc;
    for j in 0..7 {
        let dx = half * GK_NODES[j];
        let s = f(mid - dx) + f(mid + dx);
        kronrod += K_WEIGHTS[j] * s;
        if j % 2 == 1 {
            gauss += G_WEIGHTS[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss–Kronrod (7, 15) integration of `f` on `[a, b]` to
/// absolute tolerance `tol`, bisecting at most `max_depth` times.
pub fn adaptive_integrate(
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    let mut stack: Vec<(f64, f64, f64, u32)> = alloc::vec![(a, b, tol, 0)];
    let mut total = 0.0;
    while let Some((lo, hi, tol, depth)) = stack.pop() {
        let (value, err) = gauss_kronrod(lo, hi, &mut f);
        if err <= tol || depth >= max_depth {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * tol, depth + 1));
            stack.push((mid, hi, 0.5 * tol, depth + 1));
        }
    }
    total
}

/// `∫_{S^n_+} φ(β) dσ` for a function of the polar angle only.
pub fn hemisphere_integral(n: usize, tol: f64, mut phi: impl FnMut(f64) -> f64) -> f64 {
    let m = sphere_measure(n);
    m * adaptive_integrate(0.0, core::f64::consts::FRAC_PI_2, tol / m, 40, |b| {
        powi(sin(b), n as u32 - 1) * phi(b)
    })
}

/// Hyperbolic volume enclosed by an axisymmetric radial graph `ρ(β)` and the
/// horosphere, by nested adaptive quadrature.
pub fn graph_volume(n: usize, tol: f64, profile: impl Fn(f64) -> f64) -> f64 {
    hemisphere_integral(n, tol, |b| {
        let cb = cos(b);
        adaptive_integrate(0.0, profile(b), 0.1 * tol, 40, |s| {
            powi(s, n as u32) / powi(1.0 + s * cb, n as u32 + 1)
        })
    })
}

/// Volume of the cap `C_{θ,r}` by [`graph_volume`].
pub fn cap_volume(angle: ContactAngle, r: f64, n: usize, tol: f64) -> f64 {
    graph_volume(n, tol, |b| r * unit_profile(angle, b))
}

/// Observed order of accuracy from errors at spacings `h`, `h/2`, `h/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEstimate {
    /// `log₂(e_h / e_{h/2})`.
    pub coarse: f64,
    /// `log₂(e_{h/2} / e_{h/4})`.
    pub fine: f64,
    /// Errors decrease strictly and the two estimates agree within 0.3.
    pub conclusive: bool,
}

impl OrderEstimate {
    /// The finer estimate, if conclusive.
    pub fn order(&self) -> Option<f64> {
        self.conclusive.then_some(self.fine)
    }
}

/// Order estimate from three error magnitudes at successively halved spacing.
pub fn convergence_order(e_coarse: f64, e_mid: f64, e_fine: f64) -> OrderEstimate {
    let (a, b, c) = (e_coarse.abs(), e_mid.abs(), e_fine.abs());
    let decreasing = c > 0.0 && a > b && b > c && a.is_finite();
    let (coarse, fine) = if decreasing {
        (log2(a / b), log2(b / c))
    } else {
        (f64::NAN, f64::NAN)
    };
    OrderEstimate {
        coarse,
        fine,
        conclusive: decreasing && (coarse - fine).abs() <= 0.3,
    }
}

/// Five-point derivatives `(f', f'')` at `x` with step `h`.
fn derivatives(f: &impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
    let (m2, m1, c, p1, p2) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
    let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
    (d1, d2)
}

/// Hyperbolic mean curvature of the axisymmetric radial graph `ρ(β)` at each
/// row of `grid`, from the meridian curve `X = ρ sin β`, `Z = ρ cos β + 1`.
///
/// `profile` must extend evenly to `β < 0` and smoothly past `π/2`.
/// The Euclidean meridian and parallel curvatures are
/// `(Z'X'' − X'Z'')/s³` and `−Z'/(s X)` with `s = |(X', Z')|`, and
/// `H = Z (κ_m + (n − 1) κ_p) − n X'/s`.
pub fn mean_curvature_profile(grid: &GridSpec, profile: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = grid.n() as f64;
    let h = 1e-3;
    let x_of = |b: f64| profile(b) * sin(b);
    let z_of = |b: f64| profile(b) * cos(b) + 1.0;
    (0..grid.n_beta())
        .map(|i| {
            let b = grid.beta(i);
            let (x1, x2) = derivatives(&x_of, b, h);
            let (z1, z2) = derivatives(&z_of, b, h);
            let s = sqrt(x1 * x1 + z1 * z1);
            let meridian = (z1 * x2 - x1 * z2) / (s * s * s);
            let parallel = if i == 0 {
                meridian
            } else {
                -z1 / (s * x_of(b))
            };
            z_of(b) * (meridian + (n - 1.0) * parallel) - n * x1 / s
        })
        .collect()
}
