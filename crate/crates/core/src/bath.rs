//! Harmonic bath with spectral density `J(ω) = γ̂ ω^m e^{-ω²/ω_D²}` and its
//! two-point correlation machinery.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{gaussian_tail_quad, gaussian_tail_quad_osc, integrate, QuadratureSpec};

/// Correlator `h(t) = ⟨B̃(t) B⟩` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorSample {
    pub t: f64,
    pub re_h: f64,
    pub im_h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBath {
    m: u32,
    gamma_hat: f64,
    w_d: f64,
    beta: f64,
    quad: QuadratureSpec,
    variance: f64,
    gamma0: f64,
}

/// `x coth x`, accurate near zero.
fn x_coth_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 3.0
    } else {
        x / x.tanh()
    }
}

/// `x coth x - 1` without cancellation.
fn x_coth_x_minus_one(x: f64) -> f64 {
    let x2 = x * x;
    if x.abs() < 0.1 {
        x2 * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 - x2 / 4725.0)))
    } else {
        x / x.tanh() - 1.0
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Physicists' Hermite polynomial `H_n(x)`.
fn hermite(n: u32, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

impl SpectralBath {
    /// `beta = f64::INFINITY` selects the zero-temperature bath.
    pub fn new(m: u32, gamma_hat: f64, w_d: f64, beta: f64) -> Result<Self> {
        Self::with_quadrature(m, gamma_hat, w_d, beta, QuadratureSpec::default())
    }

    pub fn with_quadrature(m: u32, gamma_hat: f64, w_d: f64, beta: f64, quad: QuadratureSpec) -> Result<Self> {
        if m == 0 || m.is_multiple_of(2) {
            return Err(Error::Domain(format!("m must be odd and positive, got {m}")));
        }
        if !(gamma_hat > 0.0 && gamma_hat.is_finite()) {
            return Err(Error::Domain(format!("gamma_hat must be positive, got {gamma_hat}")));
        }
        if !(w_d > 0.0 && w_d.is_finite()) {
            return Err(Error::Domain(format!("w_D must be positive, got {w_d}")));
        }
        if !(beta > 0.0) {
            return Err(Error::Domain(format!("beta must be positive or infinite, got {beta}")));
        }
        quad.validate()?;
        let mut bath = Self { m, gamma_hat, w_d, beta, quad, variance: 0.0, gamma0: 0.0 };
        bath.variance = if bath.is_zero_temperature() {
            gamma_hat * w_d.powi(m as i32 + 1) * factorial((m - 1) / 2) / (2.0 * PI)
        } else {
            gaussian_tail_quad(|w| bath.re_h_hat(w), w_d, &quad)? / PI
        };
        bath.gamma0 = bath.gamma_t(0.0)?;
        Ok(bath)
    }

    /// Same spectrum shape with `γ̂` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Domain(format!("scale factor must be positive, got {factor}")));
        }
        let mut out = self.clone();
        out.gamma_hat *= factor;
        out.variance *= factor;
        out.gamma0 *= factor;
        Ok(out)
    }

    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn gamma_hat(&self) -> f64 {
        self.gamma_hat
    }
    pub fn w_d(&self) -> f64 {
        self.w_d
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }
    pub fn is_zero_temperature(&self) -> bool {
        self.beta.is_infinite()
    }

    /// Bath correlation time `t_B = 1/ω_D`.
    pub fn t_b(&self) -> f64 {
        1.0 / self.w_d
    }

    /// Thermal time `T_B = β`; infinite at zero temperature.
    pub fn thermal_time(&self) -> f64 {
        self.beta
    }

    /// Upper frequency used for truncated frequency integrals.
    pub fn w_max(&self) -> f64 {
        self.quad.gaussian_cutoff(self.w_d)
    }

    pub fn j_omega(&self, w: f64) -> Result<f64> {
        if w < 0.0 {
            return Err(Error::Domain(format!("J(w) needs w >= 0, got {w}")));
        }
        Ok(self.j_unchecked(w))
    }

    fn j_unchecked(&self, w: f64) -> f64 {
        self.gamma_hat * w.powi(self.m as i32) * (-(w / self.w_d).powi(2)).exp()
    }

    /// `J(ω)/ω = γ̂ ω^{m-1} e^{-ω²/ω_D²}`, the spectral function of `γ(t)`.
    pub fn j_over_w(&self, w: f64) -> f64 {
        self.gamma_hat * w.abs().powi(self.m as i32 - 1) * (-(w / self.w_d).powi(2)).exp()
    }

    /// `(Re ĥ)(ω) = coth(βω/2) J(|ω|)`; `J(|ω|)` at zero temperature.
    pub fn re_h_hat(&self, w: f64) -> f64 {
        let aw = w.abs();
        if self.is_zero_temperature() {
            return self.j_unchecked(aw);
        }
        let x = 0.5 * self.beta * aw;
        self.j_over_w(aw) * (2.0 / self.beta) * x_coth_x(x)
    }

    /// `g(ω)` with `(Îm h)(ω) = -i g(ω)`; odd extension of `J`.
    pub fn im_h_hat(&self, w: f64) -> f64 {
        if w >= 0.0 {
            self.j_unchecked(w)
        } else {
            -self.j_unchecked(-w)
        }
    }

    /// `h(t)` by cosine and sine transforms of the spectrum.
    pub fn h_t(&self, t: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.re_h_t(t)?, self.im_h_t(t)?))
    }

    pub fn re_h_t(&self, t: f64) -> Result<f64> {
        let v = gaussian_tail_quad_osc(|w| self.re_h_hat(w) * (w * t).cos(), self.w_d, t, &self.quad)?;
        Ok(v / PI)
    }

    pub fn im_h_t(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let v = gaussian_tail_quad_osc(|w| self.j_unchecked(w) * (w * t).sin(), self.w_d, t, &self.quad)?;
        Ok(-v / PI)
    }

    pub fn sample(&self, t: f64) -> Result<CorrelatorSample> {
        let h = self.h_t(t)?;
        Ok(CorrelatorSample { t, re_h: h.re, im_h: h.im })
    }

    /// `Im h(t)` from the closed-form sine transform of the Gaussian-cutoff
    /// spectrum (a Hermite function); temperature independent.
    pub fn im_h_closed(&self, t: f64) -> f64 {
        -self.gamma_hat / PI * self.sine_moment(self.m, t)
    }

    /// `γ(t)` from the closed-form cosine transform of `J(ω)/ω`.
    pub fn gamma_t_closed(&self, t: f64) -> f64 {
        self.gamma_hat / PI * self.cosine_moment(self.m - 1, t)
    }

    /// `∫₀^∞ ω^n e^{-ω²/a²} cos(ωt) dω` for even `n`.
    fn cosine_moment(&self, n: u32, t: f64) -> f64 {
        let sign = if (n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * self.gaussian_derivative(n, t)
    }

    /// `∫₀^∞ ω^n e^{-ω²/a²} sin(ωt) dω` for odd `n`.
    fn sine_moment(&self, n: u32, t: f64) -> f64 {
        let sign = if n.div_ceil(2).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * self.gaussian_derivative(n, t)
    }

    /// n-th derivative of `(a√π/2) e^{-a²t²/4}`.
    fn gaussian_derivative(&self, n: u32, t: f64) -> f64 {
        let a = self.w_d;
        let x = 0.5 * a * t;
        0.5 * a * PI.sqrt() * (-0.5 * a).powi(n as i32) * hermite(n, x) * (-x * x).exp()
    }

    /// `⟨B²⟩ = h(0)`; closed form at zero temperature.
    pub fn b_variance(&self) -> f64 {
        self.variance
    }

    /// `γ(t) = ∫₀^∞ (dω/π) J(ω) cos(ωt)/ω`.
    pub fn gamma_t(&self, t: f64) -> Result<f64> {
        let v = gaussian_tail_quad_osc(|w| self.j_over_w(w) * (w * t).cos(), self.w_d, t, &self.quad)?;
        Ok(v / PI)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    /// Time moment `∫₀^∞ t^a Re h(t) dt` from the spectrum.
    pub fn moment_integral(&self, a: u32) -> Result<f64> {
        let m = self.m;
        if a == 0 {
            if m == 1 {
                return Ok(0.5 * self.re_h_hat(0.0));
            }
            return Ok(0.0);
        }
        if a == 1 && m == 1 {
            return self.regularized_first_moment();
        }
        if a + 2 > m {
            return Err(Error::Divergence(format!("time moment a={a} diverges for m={m}")));
        }
        if a.is_multiple_of(2) {
            return Ok(0.0);
        }
        let integral = gaussian_tail_quad(|w| self.re_h_hat(w) / w.powi(a as i32 + 1), self.w_d, &self.quad)?;
        let sign = if ((a - 1) / 2).is_multiple_of(2) { -1.0 } else { 1.0 };
        Ok(sign * factorial(a) * integral / PI)
    }

    fn regularized_first_moment(&self) -> Result<f64> {
        if self.is_zero_temperature() {
            return Err(Error::Divergence("first time moment diverges for an Ohmic bath at zero temperature".into()));
        }
        let r0 = self.re_h_hat(0.0);
        let upper = self.w_max();
        let scale = 2.0 * self.gamma_hat / self.beta;
        let subtracted = |w: f64| {
            let x = 0.5 * self.beta * w;
            let y = (w / self.w_d).powi(2);
            let num = (-y).exp_m1() * x_coth_x(x) + x_coth_x_minus_one(x);
            if w == 0.0 {
                return scale * (self.beta * self.beta / 12.0 - 1.0 / (self.w_d * self.w_d));
            }
            scale * num / (w * w)
        };
        let body = integrate(subtracted, 0.0, upper, 8, &self.quad)?;
        Ok(-(body - r0 / upper) / PI)
    }

    /// `(Re ĥ)(ω) tanh(βω/2) - g(ω)`.
    pub fn kms_residual(&self, w: f64) -> Result<f64> {
        if self.is_zero_temperature() {
            return Err(Error::Domain("KMS residual needs a finite temperature".into()));
        }
        if w == 0.0 {
            return Err(Error::Domain("KMS residual needs w != 0".into()));
        }
        Ok(self.re_h_hat(w) * (0.5 * self.beta * w).tanh() - self.im_h_hat(w))
    }

    /// Both sides of `∫ t h(t) dt = -i(β/2) ∫ h(t) dt`: the left side by time
    /// quadrature of the closed-form `Im h`, the right side from `(Re ĥ)(0)`.
    pub fn kms_moment_identity(&self) -> Result<(Complex64, Complex64)> {
        if self.is_zero_temperature() {
            return Err(Error::Domain("KMS moment identity needs a finite temperature".into()));
        }
        let t_max = 2.0 * self.w_max() / (self.w_d * self.w_d);
        let first = integrate(|t| t * self.im_h_closed(t), 0.0, t_max, 16, &self.quad)?;
        let lhs = Complex64::new(0.0, 2.0 * first);
        let rhs = Complex64::new(0.0, -0.5 * self.beta * self.re_h_hat(0.0));
        Ok((lhs, rhs))
    }
}
