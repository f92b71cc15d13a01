//! Library results against independent numerical or closed-form references.

mod common;

use std::f64::consts::PI;

use num_complex::Complex64;

use common::*;
use decometer::bath::SpectralBath;
use decometer::decoherence::{MeasurementSetup, ObjectSpec, PointerSpec, Variant};
use decometer::dynamics::{self, r_t, r_t_numeric};
use decometer::numerics::{integrate, QuadratureSpec};
use decometer::wick_oracle::{FiniteBosonBath, StepFunction};

#[test]
fn correlator_matches_direct_cosine_transform() {
    for (m, w_d, beta) in [(1, 5.0, 1.0), (3, 2.0, 0.5), (5, 8.0, 2.0)] {
        let bath = SpectralBath::new(m, 0.8, w_d, beta).unwrap();
        let ct = CosineTransform::new(m, 0.8, w_d, beta, 6.0);
        for t in [0.0, 0.3, 1.1, 2.7, 6.0] {
            let lib = bath.re_h_t(t).unwrap();
            let direct = ct.eval(t);
            assert!((lib - direct).abs() <= 1e-9 * bath.b_variance(), "m={m} t={t}: {lib} vs {direct}");
        }
    }
}

#[test]
fn closed_forms_match_quadrature() {
    let spec = QuadratureSpec::new(1e-12, 1e-300, 200_000).unwrap();
    for (m, w_d) in [(1, 3.0), (3, 1.5), (5, 6.0), (7, 2.0)] {
        let bath = SpectralBath::with_quadrature(m, 1.0, w_d, 1.0, spec).unwrap();
        let upper = w_d * 8.0;
        for t in [0.0, 0.2, 0.9, 2.5] {
            let im = -integrate(|w| bath.j_omega(w).unwrap() * (w * t).sin(), 0.0, upper, 64, &spec).unwrap() / PI;
            let gamma = integrate(|w| bath.j_over_w(w) * (w * t).cos(), 0.0, upper, 64, &spec).unwrap() / PI;
            let scale = bath.gamma0() * w_d.powi(2);
            assert!((bath.im_h_closed(t) - im).abs() <= 1e-10 * scale, "Im h, m={m} t={t}");
            assert!((bath.gamma_t_closed(t) - gamma).abs() <= 1e-10 * bath.gamma0(), "gamma, m={m} t={t}");
        }
    }
}

#[test]
fn exponent_matches_time_domain_double_integral() {
    for (alpha, m, beta) in [(1, 1, 1.0), (2, 3, 0.7), (3, 1, f64::INFINITY), (1, 5, 1.5)] {
        let bath = SpectralBath::new(m, 1.0, 4.0, beta).unwrap();
        let pointer = PointerSpec::pure(1.0, 1.0, 1.0).unwrap();
        let setup = MeasurementSetup::new(1.3, alpha, ObjectSpec::spin_half(), pointer, bath, Variant::PartialEquilibrium).unwrap();
        for (x, xp, s, sp, t) in [(0.2, -0.4, 0.5, -0.5, 0.8), (-0.7, 0.1, 0.3, 0.9, 1.4)] {
            let freq = setup.d_exponent(x, xp, s, sp, t).unwrap().d;
            let time = d_time_domain(&setup, x, xp, s, sp, t);
            assert!(rel(freq, time) < 1e-7, "alpha={alpha} m={m}: {freq} vs {time}");
        }
    }
}

#[test]
fn equilibrium_generating_function_closed_vs_numeric() {
    for (alpha, eta_th) in [(1, 0.3), (2, 0.1)] {
        let setup = equilibrium_setup(alpha, 1, 5.0, eta_th, 1.5);
        for (x, xp, s, sp, t) in [(0.3, -0.2, 0.5, -0.5, 0.7), (-0.6, 0.4, -0.1, 0.8, 2.0)] {
            let closed = r_t(&setup, x, xp, s, sp, t).unwrap();
            let numeric = r_t_numeric(&setup, x, xp, s, sp, t).unwrap();
            let scale = dynamics::r0_density(&setup, x, xp).unwrap();
            assert!((closed - numeric).norm() <= 1e-6 * scale, "alpha={alpha}: {closed} vs {numeric}");
        }
    }
}

#[test]
fn wick_pairing_for_one_two_and_three_modes() {
    let baths = [
        FiniteBosonBath::new(vec![1.2], vec![Complex64::new(0.9, -0.2)], 2.0, 40).unwrap(),
        FiniteBosonBath::default_oracle(),
        FiniteBosonBath::new(
            vec![1.0, 1.3, 1.9],
            vec![Complex64::new(0.6, 0.1), Complex64::new(-0.3, 0.5), Complex64::new(0.4, 0.0)],
            3.0,
            12,
        )
        .unwrap(),
    ];
    let times = [0.4, -0.9, 1.3, 0.1, -1.6, 0.7];
    for fb in &baths {
        let orders: &[usize] = if fb.modes() == 3 { &[2, 4] } else { &[2, 4, 6] };
        for &n in orders {
            let a = fb.npoint_numeric(&times[..n]).unwrap();
            let b = fb.npoint_pairing(&times[..n]).unwrap();
            assert!(crel(a, b) < 1e-6, "N={} n={n}: {a} vs {b}", fb.modes());
        }
        let h = fb.npoint_numeric(&[0.5, 0.0]).unwrap();
        assert!(crel(h, fb.exact_h(0.5)) < 1e-8);
    }
}

#[test]
fn single_mode_correlator_is_thermal() {
    let (w, k, beta) = (1.2, Complex64::new(0.9, -0.2), 2.0);
    let fb = FiniteBosonBath::new(vec![w], vec![k], beta, 40).unwrap();
    let n = 1.0 / ((beta * w).exp() - 1.0);
    for t in [0.0, 0.6, 2.0] {
        let want = k.norm_sqr() * Complex64::new((2.0 * n + 1.0) * (w * t).cos(), -(w * t).sin());
        assert!(crel(fb.exact_h(t), want) < 1e-12, "t={t}");
    }
}

#[test]
fn characteristic_functional_and_gibbs_shift() {
    let fb = FiniteBosonBath::default_oracle();
    let k = StepFunction::new(vec![0.0, 0.6, 1.4], vec![0.2, -0.5]).unwrap();
    let l = StepFunction::new(vec![0.0, 0.6, 1.4], vec![0.3, 0.1]).unwrap();
    let closed = fb.char_functional_closed(&k, &l).unwrap();
    assert!(crel(fb.char_functional_numeric(&k, &l).unwrap(), closed) < 1e-6);
    assert!(crel(fb.centered_char_functional_numeric(&k, &l, -0.4).unwrap(), closed) < 1e-6);
    for (y, tau) in [(0.3, 0.0), (-0.2, 1.5)] {
        assert!(rel(fb.shifted_mean_b(y, tau).unwrap(), fb.shifted_mean_closed(y, tau)) < 1e-6);
    }
    assert!(rel(fb.partition_ratio(0.4).unwrap(), fb.partition_ratio_closed(0.4)) < 1e-6);
}

#[test]
fn initial_wigner_function_is_the_gaussian_ground_state() {
    let bath = SpectralBath::new(1, 0.05, 5.0, 1.0).unwrap();
    let pointer = PointerSpec::pure(1.0, 1.0, 1.0).unwrap();
    let delta = pointer.delta;
    let setup = MeasurementSetup::new(1.0, 1, ObjectSpec::spin_half(), pointer, bath, Variant::PartialEquilibrium).unwrap();
    let xs: Vec<f64> = (0..81).map(|k| -6.0 + 0.15 * k as f64).collect();
    let (lo, hi) = dynamics::momentum_window(&setup, 0.0, 7.0).unwrap();
    let ps: Vec<f64> = (0..121).map(|k| lo + (hi - lo) * k as f64 / 120.0).collect();
    let w = dynamics::wigner(&setup, 0.0, &xs, &ps).unwrap();
    for (ix, &x) in xs.iter().enumerate().step_by(10) {
        for (ip, &p) in ps.iter().enumerate().step_by(15) {
            let want = (-x * x / (2.0 * delta * delta) - 2.0 * delta * delta * p * p).exp() / PI;
            assert!((w.w[(ix, ip)] - want).abs() < 1e-10, "x={x} p={p}");
        }
    }
    assert!((w.integral() - 1.0).abs() < 1e-6);
    let marginal = w.position_marginal();
    for (ix, &x) in xs.iter().enumerate() {
        assert!((marginal[ix] - dynamics::pointer_density(&setup.pointer, x, x)).abs() < 1e-6);
    }
}

#[test]
fn evolved_state_keeps_unit_trace_and_hermiticity() {
    let setup = spin_setup(1, 1, 5.0, 0.2, 0.5);
    for t in [0.0, 0.5 * setup.time_unit(), 2.0 * setup.time_unit()] {
        let grid = dynamics::default_grid(&setup, t, 201);
        let state = dynamics::evolve(&setup, t, &grid).unwrap();
        assert!((state.trace() - 1.0).abs() < 2e-4, "trace {} at t={t}", state.trace());
        assert!(state.hermiticity_defect() < 1e-12);
    }
}
