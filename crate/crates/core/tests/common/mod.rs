//! Helpers shared by the integration tests: independent quadrature and setup builders.
#![allow(dead_code)]

use std::f64::consts::PI;

use decometer::bath::SpectralBath;
use decometer::decoherence::{MeasurementSetup, ObjectSpec, PointerSpec, Variant};
use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on `[0, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre nodes and weights on `[a, b]`.
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        for k in 0..order {
            nodes.push(a + (p as f64 + x[k]) * h);
            weights.push(w[k] * h);
        }
    }
    (nodes, weights)
}

/// `J(ω) coth(βω/2)` written out directly from the spectral density.
pub fn re_h_hat_direct(m: u32, gamma_hat: f64, w_d: f64, beta: f64, w: f64) -> f64 {
    let j = gamma_hat * w.powi(m as i32) * (-(w / w_d).powi(2)).exp();
    if beta.is_infinite() {
        j
    } else {
        j / (0.5 * beta * w).tanh()
    }
}

/// `Re h(τ) = π^{-1} ∫₀^∞ (Re ĥ)(ω) cos(ωτ) dω` on a fixed frequency rule.
pub struct CosineTransform {
    nodes: Vec<f64>,
    weighted: Vec<f64>,
}

impl CosineTransform {
    pub fn new(m: u32, gamma_hat: f64, w_d: f64, beta: f64, tau_max: f64) -> Self {
        let upper = w_d * (46.0f64).sqrt();
        let panels = ((upper * tau_max / 2.0).ceil() as usize).max(40);
        let (nodes, weights) = composite_rule(0.0, upper, panels, 20);
        let weighted = nodes.iter().zip(&weights).map(|(&w, &q)| q * re_h_hat_direct(m, gamma_hat, w_d, beta, w) / PI).collect();
        Self { nodes, weighted }
    }

    pub fn eval(&self, tau: f64) -> f64 {
        self.nodes.iter().zip(&self.weighted).map(|(w, q)| q * (w * tau).cos()).sum()
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| (a.ln() + (b / a).ln() * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Spin ±1/2 in an equal superposition, pure pointer with `Δ = 1`, the bath
/// scaled to the requested `η`, and `ε` set by `τ_ent = t_ent/β`.
pub fn spin_setup(alpha: u32, m: u32, w_d: f64, eta: f64, tau_ent: f64) -> MeasurementSetup {
    let bath = SpectralBath::new(m, 1.0, w_d, 1.0).unwrap();
    let pointer = PointerSpec::pure(1.0, 1.0, 1.0).unwrap();
    let object = ObjectSpec::spin_half();
    let probe = MeasurementSetup::new(1.0, alpha, object.clone(), pointer.clone(), bath.clone(), Variant::PartialEquilibrium).unwrap();
    let bath = bath.scaled((eta / probe.eta()).powi(2)).unwrap();
    MeasurementSetup::new(1.0 / tau_ent, alpha, object, pointer, bath, Variant::PartialEquilibrium).unwrap()
}

/// Equilibrium-apparatus setup with `M = v2 = β = 1` and the given `η_th`.
pub fn equilibrium_setup(alpha: u32, m: u32, w_d: f64, eta_th: f64, epsilon: f64) -> MeasurementSetup {
    let bath = SpectralBath::new(m, 1.0, w_d, 1.0).unwrap();
    let pointer = PointerSpec::pure(1.0, 1.0, 1.0).unwrap();
    let object = ObjectSpec::spin_half();
    let probe = MeasurementSetup::new(epsilon, alpha, object.clone(), pointer.clone(), bath.clone(), Variant::EquilibriumApparatus).unwrap();
    let bath = bath.scaled((eta_th / probe.eta_th().unwrap()).powi(2)).unwrap();
    MeasurementSetup::new(epsilon, alpha, object, pointer, bath, Variant::EquilibriumApparatus).unwrap()
}

/// `D_t` by direct double time integration of `½ ∫∫ Re h(τ−τ') f(τ) f(τ')`
/// with `f(τ) = (x'+τεs')^α − (x+τεs)^α`.
pub fn d_time_domain(setup: &MeasurementSetup, x: f64, xp: f64, s: f64, sp: f64, t: f64) -> f64 {
    let bath = &setup.bath;
    let a = setup.alpha as i32;
    let eps = setup.epsilon;
    let f = |tau: f64| (xp + tau * eps * sp).powi(a) - (x + tau * eps * s).powi(a);
    let panels = ((t * bath.w_d() / 0.4).ceil() as usize).max(4);
    let order = 12;
    let (u, wu) = gauss_legendre(order);
    let h = t / panels as f64;
    let ct = CosineTransform::new(bath.m(), bath.gamma_hat(), bath.w_d(), bath.beta(), t);
    // Re h(τ_i − τ_j) depends only on (p − q, k, l) for nodes τ = (p + u_k) h.
    let mut cache = vec![f64::NAN; (2 * panels - 1) * order * order];
    let mut acc = 0.0;
    for p in 0..panels {
        for k in 0..order {
            let ti = (p as f64 + u[k]) * h;
            let fi = f(ti) * wu[k] * h;
            for q in 0..panels {
                for l in 0..order {
                    let tj = (q as f64 + u[l]) * h;
                    let key = ((p + panels - 1 - q) * order + k) * order + l;
                    if cache[key].is_nan() {
                        cache[key] = ct.eval(ti - tj);
                    }
                    acc += fi * cache[key] * f(tj) * wu[l] * h;
                }
            }
        }
    }
    0.5 * acc
}
