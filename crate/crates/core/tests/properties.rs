use std::f64::consts::FRAC_PI_2;

use horoflow_core::flow::{cfl_dt, rhs, Stepper};
use horoflow_core::functionals::SurfaceSample;
use horoflow_core::geometry::{pointwise_frame, scalar_rhs, speed, support_functions};
use horoflow_core::grid::integrate;
use horoflow_core::umbilical::{cap_volume, radius_from_volume};
use horoflow_core::{CapSpec, ContactAngle, Field, FlowState, GridSpec};
use proptest::prelude::*;

fn cap(c: f64, r: f64) -> CapSpec {
    CapSpec::new(ContactAngle::from_cos(c).unwrap(), r, 2).unwrap()
}

/// Cap times `1 + ε cos 2kβ`; compatible with the boundary condition.
fn perturbed_state(spec: &CapSpec, grid: GridSpec, eps: f64, k: u32) -> FlowState {
    let f = f64::from(2 * k);
    let u = Field::from_fn(grid, |b, _| {
        (spec.profile_rho(b) * (1.0 + eps * (f * b).cos())).ln()
    });
    FlowState::new(u, spec.angle).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn support_functions_decompose(
        beta in 0.0..FRAC_PI_2,
        rho in 0.05..5.0f64,
        g0 in -3.0..3.0f64,
        g1 in -3.0..3.0f64,
    ) {
        let p = pointwise_frame(beta, 0.3, rho, [g0, g1]).unwrap();
        let s = support_functions(&p);
        prop_assert!(s.shifted > 0.0);
        prop_assert!((s.position - s.shifted - s.vertical).abs() <= 1e-14 * (1.0 + s.position.abs()));
    }

    #[test]
    fn rhs_is_scaled_speed(
        beta in 0.01..FRAC_PI_2,
        rho in 0.1..4.0f64,
        g0 in -2.0..2.0f64,
        g1 in -2.0..2.0f64,
        h0 in -5.0..5.0f64,
        h1 in -5.0..5.0f64,
        h2 in -5.0..5.0f64,
        c in -0.9..0.9f64,
        n in 2usize..5,
    ) {
        let angle = ContactAngle::from_cos(c).unwrap();
        let p = pointwise_frame(beta, 0.0, rho, [g0, g1]).unwrap();
        let hess = [h0, h1, h2];
        let lhs = rho * p.e_omega * scalar_rhs(&p, hess, n, angle);
        let rhs = p.v * speed(&p, hess, n, angle);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn volume_inverts(c in -0.8..0.8f64, r in 0.1..5.0f64, n in 2usize..4) {
        let angle = ContactAngle::from_cos(c).unwrap();
        let v = cap_volume(&CapSpec::new(angle, r, n).unwrap());
        let back = radius_from_volume(angle, n, v).unwrap();
        prop_assert!((back - r).abs() <= 1e-9 * r);
    }

    #[test]
    fn volume_increases(c in -0.8..0.8f64, r in 0.1..4.0f64, dr in 0.01..1.0f64) {
        prop_assert!(cap_volume(&cap(c, r + dr)) > cap_volume(&cap(c, r)));
    }

    #[test]
    fn energy_is_area_minus_wetting(
        c in -0.8..0.8f64,
        r in 0.3..3.0f64,
        eps in -0.2..0.2f64,
        k in 1u32..4,
    ) {
        let s = perturbed_state(&cap(c, r), GridSpec::axisymmetric(2, 33).unwrap(), eps, k);
        let smp = SurfaceSample::from_state(&s).unwrap();
        let e = smp.area() - c * smp.wetted_area();
        prop_assert!((smp.energy() - e).abs() <= 1e-13 * (1.0 + e.abs()));
    }

    #[test]
    fn trapezoid_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let grid = GridSpec::axisymmetric(3, 17).unwrap();
        let f = Field::from_fn(grid, |beta, _| beta.cos());
        let g = Field::from_fn(grid, |beta, _| beta * beta);
        let lin = Field::from_fn(grid, |beta, _| a * beta.cos() + b * beta * beta);
        let lhs = integrate(&lin).unwrap();
        let rhs = a * integrate(&f).unwrap() + b * integrate(&g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn caps_are_stationary(c in -0.8..0.8f64, r in 0.3..3.0f64) {
        let spec = cap(c, r);
        let coarse = rhs(&spec.state(GridSpec::axisymmetric(2, 33).unwrap()).unwrap()).unwrap();
        let fine = rhs(&spec.state(GridSpec::axisymmetric(2, 65).unwrap()).unwrap()).unwrap();
        prop_assert!(fine.sup_norm() < coarse.sup_norm() / 3.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn steps_do_not_raise_energy(
        c in -0.6..0.6f64,
        r in 0.5..2.0f64,
        eps in -0.1..0.1f64,
        k in 1u32..3,
    ) {
        let grid = GridSpec::axisymmetric(2, 33).unwrap();
        let stepper = Stepper::volume_conserving(&grid);
        let mut s = perturbed_state(&cap(c, r), grid, eps, k);
        let mut e = SurfaceSample::from_state(&s).unwrap().energy();
        for _ in 0..50 {
            let dt = cfl_dt(&s, 0.2).unwrap();
            s = stepper.step(&s, dt).unwrap().0;
            let next = SurfaceSample::from_state(&s).unwrap().energy();
            prop_assert!(next <= e + 1e-10 * (1.0 + e.abs()), "{e} -> {next}");
            e = next;
        }
    }

    #[test]
    fn steps_conserve_discrete_volume(
        c in -0.6..0.6f64,
        r in 0.5..2.0f64,
        eps in -0.1..0.1f64,
    ) {
        let grid = GridSpec::axisymmetric(2, 33).unwrap();
        let stepper = Stepper::volume_conserving(&grid);
        let mut s = perturbed_state(&cap(c, r), grid, eps, 1);
        let v0 = SurfaceSample::from_state(&s).unwrap().enclosed_volume();
        for _ in 0..50 {
            let dt = cfl_dt(&s, 0.2).unwrap();
            s = stepper.step(&s, dt).unwrap().0;
        }
        let v = SurfaceSample::from_state(&s).unwrap().enclosed_volume();
        prop_assert!((v - v0).abs() <= 1e-6 * v0, "{v0} -> {v}");
    }

    #[test]
    fn full2d_keeps_axisymmetric_data(c in -0.5..0.5f64, eps in -0.1..0.1f64) {
        let grid = GridSpec::full2d(17, 16).unwrap();
        let stepper = Stepper::volume_conserving(&grid);
        let mut s = perturbed_state(&cap(c, 1.0), grid, eps, 1);
        for _ in 0..10 {
            let dt = cfl_dt(&s, 0.2).unwrap();
            s = stepper.step(&s, dt).unwrap().0;
            prop_assert!(s.u().xi_variation() <= 1e-12);
        }
    }
}
