//! Decoherence exponent `D_t`, its peak value and rate, and the decoherence,
//! entanglement and readout times derived from them.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bath::SpectralBath;
use crate::error::{Error, Result};
use crate::numerics::{
    find_root_increasing, gauss_legendre_10, gaussian_tail_quad, integrate, integrate_vec, oscillation_pieces,
    osc_poly_table, QuadratureSpec,
};

/// Coherences `|⟨s|ρ_S|s'⟩|` at or below this are treated as absent.
pub const COHERENCE_FLOOR: f64 = 1e-12;
/// Largest supported pointer-bath exponent.
pub const MAX_ALPHA: u32 = 6;
/// Ratio below (above) which an asymptotic regime is flagged as valid.
pub const REGIME_MARGIN: f64 = 0.1;

pub(crate) const MAX_TERMS: usize = MAX_ALPHA as usize + 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectSpec {
    eigenvalues: Vec<f64>,
    rho: DMatrix<Complex64>,
    energies: Option<Vec<f64>>,
}

impl ObjectSpec {
    pub fn new(eigenvalues: Vec<f64>, rho: DMatrix<Complex64>, energies: Option<Vec<f64>>) -> Result<Self> {
        let n = eigenvalues.len();
        if n == 0 {
            return Err(Error::Domain("object needs at least one eigenvalue".into()));
        }
        if eigenvalues.iter().any(|s| !s.is_finite()) {
            return Err(Error::Domain("eigenvalues must be finite".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if eigenvalues[i] == eigenvalues[j] {
                    return Err(Error::Domain(format!("eigenvalue {} is degenerate", eigenvalues[i])));
                }
            }
        }
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::Domain(format!("rho_S must be {n}x{n}")));
        }
        if let Some(e) = &energies {
            if e.len() != n {
                return Err(Error::Domain("energies must match eigenvalues".into()));
            }
        }
        let herm = (&rho - rho.adjoint()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if herm > 1e-12 {
            return Err(Error::Domain(format!("rho_S is not Hermitian (deviation {herm:e})")));
        }
        let trace = rho.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::Domain(format!("rho_S trace is {trace}, expected 1")));
        }
        let min_eig = rho.clone().symmetric_eigen().eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        if min_eig < -1e-12 {
            return Err(Error::Domain(format!("rho_S has negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { eigenvalues, rho, energies })
    }

    /// Pure state `|ψ⟩⟨ψ|` with `ψ` normalized from the given amplitudes.
    pub fn pure(eigenvalues: Vec<f64>, amplitudes: &[Complex64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.len() != eigenvalues.len() || norm == 0.0 {
            return Err(Error::Domain("amplitudes must match eigenvalues and be nonzero".into()));
        }
        let n = amplitudes.len();
        let rho = DMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj() / (norm * norm));
        Self::new(eigenvalues, rho, None)
    }

    /// Spin-1/2 in the equal superposition of `s = ∓1/2`.
    pub fn spin_half() -> Self {
        let a = Complex64::new(1.0, 0.0);
        Self::pure(vec![-0.5, 0.5], &[a, a]).expect("valid spin state")
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }
    pub fn energies(&self) -> Option<&[f64]> {
        self.energies.as_deref()
    }
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }
    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `⟨s_i|ρ_S^0(t)|s_j⟩`: pure-dephasing free evolution when energies are given.
    pub fn rho_at(&self, i: usize, j: usize, t: f64) -> Complex64 {
        let r = self.rho[(i, j)];
        match &self.energies {
            Some(e) => r * Complex64::new(0.0, -t * (e[i] - e[j])).exp(),
            None => r,
        }
    }

    /// Index pairs `i < j` whose coherence exceeds [`COHERENCE_FLOOR`].
    pub fn coupled_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.rho[(i, j)].norm() > COHERENCE_FLOOR {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Smallest eigenvalue gap among coupled pairs.
    pub fn delta_s(&self) -> Result<f64> {
        self.coupled_pairs()
            .iter()
            .map(|&(i, j)| (self.eigenvalues[i] - self.eigenvalues[j]).abs())
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
            .ok_or_else(|| Error::Domain("object has no coherent eigenvalue pair".into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointerSpec {
    pub delta: f64,
    pub lambda: f64,
    pub mass: f64,
    pub v2: f64,
    pub delta_class: Option<f64>,
}

impl PointerSpec {
    pub fn new(delta: f64, lambda: f64, mass: f64, v2: f64, delta_class: Option<f64>) -> Result<Self> {
        for (name, v) in [("delta", delta), ("lambda", lambda), ("mass", mass), ("v2", v2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("pointer {name} must be positive, got {v}")));
            }
        }
        if let Some(dc) = delta_class {
            if !(dc > 0.0) {
                return Err(Error::Domain(format!("delta_class must be positive, got {dc}")));
            }
        }
        if lambda > 4.0 * PI * delta * (1.0 + 1e-12) {
            return Err(Error::Domain(format!("lambda = {lambda} violates lambda <= 4 pi delta = {}", 4.0 * PI * delta)));
        }
        Ok(Self { delta, lambda, mass, v2, delta_class })
    }

    /// Minimum-uncertainty pointer, `λ = 4πΔ`.
    pub fn pure(delta: f64, mass: f64, v2: f64) -> Result<Self> {
        Self::new(delta, 4.0 * PI * delta, mass, v2, None)
    }

    /// Pointer oscillation period scale `T_P = (M/V''(0))^{1/2}`.
    pub fn t_p(&self) -> f64 {
        (self.mass / self.v2).sqrt()
    }

    /// `λΔ/(2π)` divided by `(M v2)^{-1/2}`; near 1 for an unsqueezed state.
    pub fn squeezing_ratio(&self) -> f64 {
        self.lambda * self.delta / (2.0 * PI) * (self.mass * self.v2).sqrt()
    }

    pub fn is_minimum_uncertainty(&self) -> bool {
        (self.lambda - 4.0 * PI * self.delta).abs() <= 1e-9 * self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    PartialEquilibrium,
    EquilibriumApparatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSetup {
    pub epsilon: f64,
    pub alpha: u32,
    pub object: ObjectSpec,
    pub pointer: PointerSpec,
    pub bath: SpectralBath,
    pub variant: Variant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecResult {
    pub d: f64,
    pub phi: f64,
}

/// Closed-form asymptotic decoherence time with its advisory validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptote {
    pub t_dec: f64,
    pub regime_valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDecTime {
    pub t_dec: f64,
    pub pair: (f64, f64),
    pub below_t_ent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectCoupling {
    pub t_dec_direct: f64,
    pub ratio_to_markov: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub lambda_over_delta: f64,
    pub minimum_uncertainty: bool,
    pub squeezing_ratio: f64,
    pub beta_over_t_p: Option<f64>,
    pub eta: f64,
    pub eta_th: Option<f64>,
    pub gamma0: f64,
    pub delta_eff: Option<f64>,
    pub w_eff: Option<f64>,
    pub barrier_height: Option<f64>,
    pub t_dec: Option<f64>,
    pub t_dec_over_t_p: Option<f64>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `c_α(s,s') = |s'^α − s^α| / |s' − s|^α`.
pub fn c_alpha(s: f64, s_prime: f64, alpha: u32) -> Result<f64> {
    if s == s_prime {
        return Err(Error::Domain("c_alpha needs s != s'".into()));
    }
    if alpha == 1 {
        return Ok(1.0);
    }
    let a = alpha as i32;
    Ok((s_prime.powi(a) - s.powi(a)).abs() / (s_prime - s).abs().powi(a))
}

/// `(x + u·v)^α` as coefficients in `u`.
fn shifted_power(alpha: u32, x: f64, v: f64) -> [f64; MAX_TERMS] {
    let mut out = [0.0; MAX_TERMS];
    for k in 0..=alpha {
        out[k as usize] = binomial(alpha, k) * x.powi((alpha - k) as i32) * v.powi(k as i32);
    }
    out
}

fn eval_poly(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ck| acc * u + ck)
}

/// Sum `Σ_{k≥0} (iz)^k (α−1)!/(α+k)!` truncated, i.e. `∫₀¹ (1−u)^{α−1} e^{izu} du`.
fn weighted_phase_integral(alpha: u32, z: f64) -> Complex64 {
    if z.abs() >= (alpha as f64).max(1.0) {
        let mut table = [Complex64::new(0.0, 0.0); MAX_TERMS];
        osc_poly_table(z, 1.0, &mut table[..alpha as usize]);
        return Complex64::new(0.0, z).exp() * table[alpha as usize - 1];
    }
    let mut term = Complex64::new(1.0 / alpha as f64, 0.0);
    let mut sum = term;
    let iz = Complex64::new(0.0, z);
    for k in 1..200u32 {
        term = term * iz / (alpha + k) as f64;
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// `z ∫₀^∞ dv e^{-v²} ∫₀¹ du (1−u)^{α−1} sin(z u v) − ln z`; tends to `k_α` as `z → ∞`.
pub fn ohmic_log_constant_at(alpha: u32, z: f64) -> Result<f64> {
    if alpha == 0 || !(z > 0.0) {
        return Err(Error::Domain("ohmic_log_constant_at needs alpha >= 1 and z > 0".into()));
    }
    let spec = QuadratureSpec { rel_tol: 1e-11, abs_tol: 1e-15, max_subdivisions: 400_000 };
    let upper = spec.gaussian_cutoff(1.0);
    let body = integrate(
        |v| (-v * v).exp() * weighted_phase_integral(alpha, z * v).im,
        0.0,
        upper,
        oscillation_pieces(upper, z),
        &spec,
    )?;
    Ok(z * body - z.ln())
}

/// `k₁ = lim_{z→∞} (∫₀^∞ e^{-v²}(1 − cos zv)/v dv − ln z)`, evaluated numerically.
pub fn k_one() -> f64 {
    static K1: OnceLock<f64> = OnceLock::new();
    *K1.get_or_init(|| ohmic_log_constant_at(1, 4000.0).expect("k1 quadrature converges"))
}

/// `k_α = k₁ − Σ_{j=1}^{α−1} 1/j`.
pub fn k_alpha(alpha: u32) -> f64 {
    k_one() - (1..alpha).map(|j| 1.0 / j as f64).sum::<f64>()
}

impl MeasurementSetup {
    /// Builds a setup; the equilibrium variant replaces `Δ` and `λ` with their
    /// thermal values `(β v2)^{-1/2}` and `2π(β/M)^{1/2}`.
    pub fn new(
        epsilon: f64,
        alpha: u32,
        object: ObjectSpec,
        pointer: PointerSpec,
        bath: SpectralBath,
        variant: Variant,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        if alpha == 0 || alpha > MAX_ALPHA {
            return Err(Error::Domain(format!("alpha must be in 1..={MAX_ALPHA}, got {alpha}")));
        }
        let mut pointer = pointer;
        if variant == Variant::EquilibriumApparatus {
            if bath.is_zero_temperature() {
                return Err(Error::Domain("equilibrium apparatus needs a finite temperature".into()));
            }
            let beta = bath.beta();
            pointer.delta = (beta * pointer.v2).powf(-0.5);
            pointer.lambda = 2.0 * PI * (beta / pointer.mass).sqrt();
            pointer = PointerSpec::new(pointer.delta, pointer.lambda, pointer.mass, pointer.v2, pointer.delta_class)?;
        }
        Ok(Self { epsilon, alpha, object, pointer, bath, variant })
    }

    /// Setup in the dimensionless units of the published decoherence-time
    /// curves: `Δ = 1`, eigenvalues `{0, 1}` (so `c_α = 1`), `ε = 1/τ_ent`, and
    /// `γ̂` scaled so that `η` (or `η_D` at zero temperature) takes the given value.
    ///
    /// Finite temperature uses `β = 1` and `ω_D = w_d`; zero temperature uses
    /// `ω_D = 1`, and `tau_ent` is then in units of `1/ω_D`.
    pub fn dimensionless(alpha: u32, m: u32, eta: f64, tau_ent: f64, w_d: f64, zero_temperature: bool) -> Result<Self> {
        let (beta, wd) = if zero_temperature { (f64::INFINITY, 1.0) } else { (1.0, w_d) };
        let unit = SpectralBath::new(m, 1.0, wd, beta)?;
        let scale = if zero_temperature { wd } else { 1.0 / beta };
        let target_variance = (eta * scale).powi(2);
        let bath = unit.scaled(target_variance / unit.b_variance())?;
        let a = Complex64::new(1.0, 0.0);
        let object = ObjectSpec::pure(vec![0.0, 1.0], &[a, a])?;
        let pointer = PointerSpec::pure(1.0, 1.0, 1.0)?;
        Self::new(1.0 / tau_ent, alpha, object, pointer, bath, Variant::PartialEquilibrium)
    }

    fn quad(&self) -> &QuadratureSpec {
        self.bath.quadrature()
    }

    /// Natural time unit of reported times: `β` at finite temperature, `1/ω_D` at zero temperature.
    pub fn time_unit(&self) -> f64 {
        if self.bath.is_zero_temperature() {
            self.bath.t_b()
        } else {
            self.bath.beta()
        }
    }

    /// Polynomial coefficients `F_k` of `f(tu) = (x' + tuεs')^α − (x + tuεs)^α`.
    pub(crate) fn difference_coeffs(&self, x: f64, x_prime: f64, s: f64, s_prime: f64, t: f64) -> [f64; MAX_TERMS] {
        let a = shifted_power(self.alpha, x_prime, t * self.epsilon * s_prime);
        let b = shifted_power(self.alpha, x, t * self.epsilon * s);
        let mut out = [0.0; MAX_TERMS];
        for k in 0..MAX_TERMS {
            out[k] = a[k] - b[k];
        }
        out
    }

    fn sum_coeffs(&self, x: f64, x_prime: f64, s: f64, s_prime: f64, t: f64) -> [f64; MAX_TERMS] {
        let a = shifted_power(self.alpha, x_prime, t * self.epsilon * s_prime);
        let b = shifted_power(self.alpha, x, t * self.epsilon * s);
        let mut out = [0.0; MAX_TERMS];
        for k in 0..MAX_TERMS {
            out[k] = a[k] + b[k];
        }
        out
    }

    /// `(t²/2π) ∫₀^∞ Re ĥ(ω) |Σ_k F_k I_k(ωt)|² dω` with `I_k(z) = ∫₀¹ u^k e^{-izu} du`.
    fn frequency_form(&self, f: &[f64; MAX_TERMS], t: f64) -> Result<f64> {
        let n = self.alpha as usize + 1;
        if f[..n].iter().all(|c| *c == 0.0) || t == 0.0 {
            return Ok(0.0);
        }
        let upper = self.bath.w_max();
        let integral = integrate(
            |w| {
                let mut table = [Complex64::new(0.0, 0.0); MAX_TERMS];
                osc_poly_table(w * t, 1.0, &mut table[..n]);
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += table[k] * f[k];
                }
                self.bath.re_h_hat(w) * acc.norm_sqr()
            },
            0.0,
            upper,
            oscillation_pieces(upper, t),
            self.quad(),
        )?;
        Ok((t * t * integral / (2.0 * PI)).max(0.0))
    }

    /// Largest `|r|` at which `Im h(r)` is non-negligible.
    fn im_h_range(&self) -> f64 {
        let a = self.bath.w_d();
        2.0 * (self.quad().gaussian_cutoff(1.0) + 1.0) / a
    }

    /// `−t² ∫₀¹ dρ Im h(tρ) ∫_ρ¹ F(u) G(u−ρ) du`.
    fn phase_form(&self, f: &[f64; MAX_TERMS], g: &[f64; MAX_TERMS], t: f64) -> Result<f64> {
        let n = self.alpha as usize + 1;
        if f[..n].iter().all(|c| *c == 0.0) || t == 0.0 {
            return Ok(0.0);
        }
        let rho_max = (self.im_h_range() / t.abs()).min(1.0);
        let inner = |rho: f64| gauss_legendre_10(|u| eval_poly(&f[..n], u) * eval_poly(&g[..n], u - rho), rho, 1.0);
        let spec = QuadratureSpec { abs_tol: 0.0, ..*self.quad() };
        let v = integrate(|rho| self.bath.im_h_closed(t * rho) * inner(rho), 0.0, rho_max, 8, &spec)?;
        Ok(-t * t * v)
    }

    /// Decoherence exponent `D_t(x,x';s,s')` and phase `φ_t(x,x';s,s')`.
    pub fn d_exponent(&self, x: f64, x_prime: f64, s: f64, s_prime: f64, t: f64) -> Result<DecResult> {
        if t == 0.0 {
            return Ok(DecResult { d: 0.0, phi: 0.0 });
        }
        let f = self.difference_coeffs(x, x_prime, s, s_prime, t);
        let g = self.sum_coeffs(x, x_prime, s, s_prime, t);
        let d = self.frequency_form(&f, t)?;
        let phi = self.phase_form(&f, &g, t)?;
        Ok(DecResult { d, phi })
    }

    fn power_gap(&self, s: f64, s_prime: f64) -> f64 {
        let a = self.alpha as i32;
        s_prime.powi(a) - s.powi(a)
    }

    /// Whether `s^α = s'^α`, so the coupling never damps this pair.
    pub fn is_decoherence_free(&self, s: f64, s_prime: f64) -> bool {
        let a = self.alpha as i32;
        let gap = self.power_gap(s, s_prime).abs();
        gap <= 1e-14 * s.abs().powi(a).max(s_prime.abs().powi(a))
    }

    /// `D_t^peak(s,s') = D_t(0,0;s,s')`.
    pub fn d_peak(&self, s: f64, s_prime: f64, t: f64) -> Result<f64> {
        if t == 0.0 || self.is_decoherence_free(s, s_prime) {
            return Ok(0.0);
        }
        let f = self.difference_coeffs(0.0, 0.0, s, s_prime, t);
        self.frequency_form(&f, t)
    }

    /// `∂D_t^peak/∂t` as a single frequency integral.
    pub fn d_peak_rate(&self, s: f64, s_prime: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("d_peak_rate needs t > 0, got {t}")));
        }
        if self.is_decoherence_free(s, s_prime) {
            return Ok(0.0);
        }
        let alpha = self.alpha;
        let upper = self.bath.w_max();
        let integral = integrate(
            |w| self.bath.re_h_hat(w) * weighted_phase_integral(alpha, w * t).im / w,
            0.0,
            upper,
            oscillation_pieces(upper, t),
            self.quad(),
        )?;
        let prefactor = self.epsilon.powi(2 * alpha as i32) * self.power_gap(s, s_prime).powi(2);
        Ok(prefactor * alpha as f64 * t.powi(2 * alpha as i32) * integral / PI)
    }

    /// `t_ent(s,s') = Δ/(ε|s'−s|)`.
    pub fn t_ent(&self, s: f64, s_prime: f64) -> Result<f64> {
        if s == s_prime {
            return Err(Error::Domain("t_ent needs s != s'".into()));
        }
        Ok(self.pointer.delta / (self.epsilon * (s_prime - s).abs()))
    }

    /// `Δ/(ε δs)` with `δs` the smallest gap among coherent pairs.
    pub fn t_ent_global(&self) -> Result<f64> {
        Ok(self.pointer.delta / (self.epsilon * self.object.delta_s()?))
    }

    /// `t_class = Δ_class/(ε δs)`.
    pub fn t_class(&self) -> Result<f64> {
        let dc = self
            .pointer
            .delta_class
            .ok_or_else(|| Error::Config("t_class needs pointer.delta_class".into()))?;
        Ok(dc / (self.epsilon * self.object.delta_s()?))
    }

    /// `η = ⟨B²⟩^{1/2} Δ^α β`; at zero temperature `η_D = ⟨B²⟩^{1/2} Δ^α / ω_D`.
    pub fn eta(&self) -> f64 {
        let base = self.bath.b_variance().sqrt() * self.pointer.delta.powi(self.alpha as i32);
        if self.bath.is_zero_temperature() {
            base / self.bath.w_d()
        } else {
            base * self.bath.beta()
        }
    }

    /// `η_th = ⟨B²⟩^{1/2} Δ_th^α β` with `Δ_th = (β v2)^{-1/2}`.
    pub fn eta_th(&self) -> Option<f64> {
        if self.bath.is_zero_temperature() {
            return None;
        }
        let beta = self.bath.beta();
        let delta_th = (beta * self.pointer.v2).powf(-0.5);
        Some(self.bath.b_variance().sqrt() * delta_th.powi(self.alpha as i32) * beta)
    }

    fn require_decoherent(&self, s: f64, s_prime: f64) -> Result<()> {
        if s == s_prime || self.is_decoherence_free(s, s_prime) {
            return Err(Error::DecoherenceFree { s, s_prime });
        }
        Ok(())
    }

    /// Root of `D_t^peak(s,s') = 1`.
    pub fn t_dec_exact(&self, s: f64, s_prime: f64) -> Result<f64> {
        self.require_decoherent(s, s_prime)?;
        let hint = self.t_dec_interaction(s, s_prime)?.t_dec;
        find_root_increasing(|t| self.d_peak(s, s_prime, t), 1.0, hint, 1e-9)
    }

    /// Interaction-dominated asymptote; a lower bound on the exact time.
    pub fn t_dec_interaction(&self, s: f64, s_prime: f64) -> Result<Asymptote> {
        self.require_decoherent(s, s_prime)?;
        let alpha = self.alpha as f64;
        let h0 = self.bath.b_variance();
        let gap2 = self.power_gap(s, s_prime).powi(2);
        let t = (2.0 * (alpha + 1.0).powi(2) / (self.epsilon.powi(2 * self.alpha as i32) * gap2 * h0))
            .powf(1.0 / (2.0 * alpha + 2.0));
        Ok(Asymptote { t_dec: t, regime_valid: t <= REGIME_MARGIN * self.bath.t_b() })
    }

    /// Finite-temperature Markov asymptote: Ohmic (`m = 1`) or super-Ohmic (`m ≥ 3`).
    pub fn t_dec_markov(&self, s: f64, s_prime: f64) -> Result<Asymptote> {
        self.require_decoherent(s, s_prime)?;
        if self.bath.is_zero_temperature() {
            return Err(Error::Domain("finite-temperature Markov form needs finite beta".into()));
        }
        let alpha = self.alpha as f64;
        let beta = self.bath.beta();
        let strength = self.epsilon.powi(2 * self.alpha as i32) * self.power_gap(s, s_prime).powi(2);
        let t = if self.bath.m() == 1 {
            let m0 = self.bath.moment_integral(0)?;
            ((2.0 * alpha + 1.0) / (strength * m0)).powf(1.0 / (2.0 * alpha + 1.0))
        } else {
            let m1 = self.bath.moment_integral(1)?.abs();
            (2.0 / (strength * m1)).powf(1.0 / (2.0 * alpha))
        };
        Ok(Asymptote { t_dec: t, regime_valid: t * REGIME_MARGIN >= beta })
    }

    /// Zero-temperature Markov asymptote.
    pub fn t_dec_zero_t_markov(&self, s: f64, s_prime: f64) -> Result<Asymptote> {
        self.require_decoherent(s, s_prime)?;
        if !self.bath.is_zero_temperature() {
            return Err(Error::Domain("zero-temperature Markov form needs beta = infinity".into()));
        }
        let alpha = self.alpha as f64;
        let c = c_alpha(s, s_prime, self.alpha)?;
        let eta_d = self.eta();
        let t_ent = self.t_ent(s, s_prime)?;
        let w_d = self.bath.w_d();
        let m = self.bath.m();
        let t = if m >= 3 {
            t_ent * ((m as f64 - 1.0).sqrt() / (c * eta_d)).powf(1.0 / alpha)
        } else {
            let k = k_alpha(self.alpha);
            let base = t_ent / (c * eta_d).powf(1.0 / alpha);
            let log_factor = |t: f64| (w_d * t).ln() + k - 0.5 / alpha;
            let mut u = base.ln();
            let mut converged = false;
            for _ in 0..500 {
                let l = log_factor(u.exp());
                if !(l > 0.0) {
                    return Err(Error::Iteration(format!(
                        "log factor {l:.3} is not positive; outside the zero-temperature Ohmic Markov regime"
                    )));
                }
                let mapped = base.ln() - l.ln() / (2.0 * alpha);
                let slope = 1.0 / (2.0 * alpha * l);
                let next = u + (mapped - u) / (1.0 + slope);
                if (next - u).abs() <= 1e-14 * u.abs().max(1.0) {
                    u = next;
                    converged = true;
                    break;
                }
                u = next;
            }
            if !converged {
                return Err(Error::Iteration("Ohmic zero-temperature relation did not converge".into()));
            }
            u.exp()
        };
        Ok(Asymptote { t_dec: t, regime_valid: t * REGIME_MARGIN >= self.bath.t_b() })
    }

    /// Largest `t_dec_exact` over coherent, non-decoherence-free pairs.
    pub fn measurement_t_dec(&self) -> Result<MeasurementDecTime> {
        let ev = self.object.eigenvalues();
        let mut best: Option<(f64, (f64, f64))> = None;
        for (i, j) in self.object.coupled_pairs() {
            let (s, sp) = (ev[i], ev[j]);
            if self.is_decoherence_free(s, sp) {
                continue;
            }
            let t = self.t_dec_exact(s, sp)?;
            if best.is_none_or(|(b, _)| t > b) {
                best = Some((t, (s, sp)));
            }
        }
        let (t_dec, pair) = best.ok_or_else(|| {
            let (s, s_prime) = self.object.coupled_pairs().first().map_or((0.0, 0.0), |&(i, j)| (ev[i], ev[j]));
            Error::DecoherenceFree { s, s_prime }
        })?;
        let below_t_ent = t_dec < self.t_ent_global()?;
        Ok(MeasurementDecTime { t_dec, pair, below_t_ent })
    }

    /// Decoherence time if the object coupled to the bath directly, and its
    /// ratio to the finite-temperature Ohmic Markov time.
    pub fn direct_coupling_t_dec(&self, s: f64, s_prime: f64) -> Result<DirectCoupling> {
        if self.bath.is_zero_temperature() || self.bath.m() != 1 {
            return Err(Error::Domain("direct coupling comparison needs a finite-temperature Ohmic bath".into()));
        }
        if self.is_decoherence_free(s, s_prime) {
            return Ok(DirectCoupling { t_dec_direct: f64::INFINITY, ratio_to_markov: f64::INFINITY });
        }
        let a = self.alpha as i32;
        let ds = self.object.delta_s()?;
        let m0 = self.bath.moment_integral(0)?;
        let t_direct = (ds / self.pointer.delta).powi(2 * a) / (self.power_gap(s, s_prime).powi(2) * m0);
        let markov = self.t_dec_markov(s, s_prime)?.t_dec;
        Ok(DirectCoupling { t_dec_direct: t_direct, ratio_to_markov: t_direct / markov })
    }

    /// Consistency and stability report.
    pub fn validate_setup(&self) -> Result<Diagnostics> {
        let p = &self.pointer;
        let mut rep = Diagnostics {
            lambda_over_delta: p.lambda / p.delta,
            minimum_uncertainty: p.is_minimum_uncertainty(),
            squeezing_ratio: p.squeezing_ratio(),
            eta: self.eta(),
            eta_th: self.eta_th(),
            gamma0: self.bath.gamma0(),
            ..Default::default()
        };
        if rep.minimum_uncertainty {
            rep.notes.push("pointer is a pure minimum-uncertainty Gaussian (lambda = 4 pi delta)".into());
        }
        if !(1.0 / 3.0..=3.0).contains(&rep.squeezing_ratio) {
            rep.warnings.push(format!(
                "pointer state is squeezed: lambda*delta/(2 pi) differs from (M v2)^(-1/2) by factor {:.3}",
                rep.squeezing_ratio
            ));
        }
        if !self.bath.is_zero_temperature() {
            let beta = self.bath.beta();
            rep.beta_over_t_p = Some(beta / p.t_p());
            if beta >= REGIME_MARGIN * p.t_p() {
                rep.warnings.push("thermal time is not small compared with T_P".into());
            }
        }
        let g0 = self.bath.gamma0();
        if self.alpha == 1 && !self.bath.is_zero_temperature() && p.v2 > 2.0 * g0 {
            rep.delta_eff = Some((self.bath.beta() * (p.v2 - 2.0 * g0)).powf(-0.5));
        }
        if self.alpha > 1 {
            let a = self.alpha as f64;
            let x_max = (p.v2 / (2.0 * a * g0)).powf(1.0 / (2.0 * a - 2.0));
            rep.w_eff = Some(2.0 * x_max);
            rep.barrier_height = Some(0.5 * p.v2 * x_max * x_max - g0 * x_max.powi(2 * self.alpha as i32));
        }
        let stability_problem = match (self.alpha, rep.eta_th) {
            (_, None) => None,
            (1, Some(e)) if e >= 0.5f64.sqrt() || 2.0 * g0 >= p.v2 => {
                Some(format!("alpha = 1 requires eta_th < 1/sqrt(2) and 2 gamma0 < v2 (eta_th = {e:.4})"))
            }
            (a, Some(e)) if a > 1 && e >= 0.2 => Some(format!("alpha > 1 requires eta_th << 1 (eta_th = {e:.4} >= 0.2)")),
            _ => None,
        };
        if let Some(msg) = stability_problem {
            if self.variant == Variant::EquilibriumApparatus {
                return Err(Error::Stability(msg));
            }
            rep.warnings.push(msg);
        }
        match self.measurement_t_dec() {
            Ok(m) => {
                rep.t_dec = Some(m.t_dec);
                rep.t_dec_over_t_p = Some(m.t_dec / p.t_p());
                if m.below_t_ent {
                    rep.warnings.push("t_dec is below t_ent; the peak exponent does not define the readout".into());
                }
                if m.t_dec >= REGIME_MARGIN * p.t_p() {
                    rep.warnings.push("t_dec is not small compared with T_P".into());
                }
            }
            Err(e) => rep.warnings.push(format!("decoherence time unavailable: {e}")),
        }
        Ok(rep)
    }

    /// Precomputed quadratic forms for repeated `D_t`, `φ_t` evaluation at one `t`.
    pub fn kernel(&self, t: f64) -> Result<DecoherenceKernel> {
        let n = self.alpha as usize + 1;
        let mut gram = vec![0.0; n * n];
        let mut cross = vec![0.0; n * n];
        if t != 0.0 {
            let upper = self.bath.w_max();
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (k..n).map(move |l| (k, l))).collect();
            let values = integrate_vec(
                |w, out: &mut [f64]| {
                    let mut table = [Complex64::new(0.0, 0.0); MAX_TERMS];
                    osc_poly_table(w * t, 1.0, &mut table[..n]);
                    let weight = self.bath.re_h_hat(w);
                    for (slot, &(k, l)) in out.iter_mut().zip(&pairs) {
                        *slot = weight * (table[k] * table[l].conj()).re;
                    }
                },
                0.0,
                upper,
                pairs.len(),
                oscillation_pieces(upper, t),
                self.quad(),
            )?;
            for (v, &(k, l)) in values.iter().zip(&pairs) {
                let m = t * t * v / (2.0 * PI);
                gram[k * n + l] = m;
                gram[l * n + k] = m;
            }
            let rho_max = (self.im_h_range() / t.abs()).min(1.0);
            let spec = QuadratureSpec { abs_tol: 0.0, ..*self.quad() };
            let values = integrate_vec(
                |rho, out: &mut [f64]| {
                    let weight = self.bath.im_h_closed(t * rho);
                    for k in 0..n {
                        for l in 0..n {
                            let q = gauss_legendre_10(|u| u.powi(k as i32) * (u - rho).powi(l as i32), rho, 1.0);
                            out[k * n + l] = weight * q;
                        }
                    }
                },
                0.0,
                rho_max,
                n * n,
                8,
                &spec,
            )?;
            for (slot, v) in cross.iter_mut().zip(values) {
                *slot = -t * t * v;
            }
        }
        Ok(DecoherenceKernel { alpha: self.alpha, epsilon: self.epsilon, t, gram, cross })
    }
}

/// `D_t` and `φ_t` as quadratic forms in the polynomial coefficients of the
/// coupling difference, for one fixed time.
#[derive(Debug, Clone)]
pub struct DecoherenceKernel {
    alpha: u32,
    epsilon: f64,
    t: f64,
    gram: Vec<f64>,
    cross: Vec<f64>,
}

impl DecoherenceKernel {
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eval(&self, x: f64, x_prime: f64, s: f64, s_prime: f64) -> DecResult {
        let n = self.alpha as usize + 1;
        let v = self.t * self.epsilon;
        let a = shifted_power(self.alpha, x_prime, v * s_prime);
        let b = shifted_power(self.alpha, x, v * s);
        let mut d = 0.0;
        let mut phi = 0.0;
        for k in 0..n {
            let fk = a[k] - b[k];
            for l in 0..n {
                let fl = a[l] - b[l];
                let gl = a[l] + b[l];
                d += fk * self.gram[k * n + l] * fl;
                phi += fk * self.cross[k * n + l] * gl;
            }
        }
        DecResult { d: d.max(0.0), phi }
    }
}

/// One row of a decoherence-time sweep in dimensionless units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub tau_ent: f64,
    pub eta: f64,
    pub tau_dec: f64,
    pub tau_interaction: f64,
    pub tau_markov: f64,
    pub interaction_valid: bool,
    pub markov_valid: bool,
}

/// Exact and asymptotic decoherence times for the dimensionless setup of
/// [`MeasurementSetup::dimensionless`], all in its time unit.
pub fn sweep_point(alpha: u32, m: u32, eta: f64, tau_ent: f64, w_d: f64, zero_temperature: bool) -> Result<SweepPoint> {
    let setup = MeasurementSetup::dimensionless(alpha, m, eta, tau_ent, w_d, zero_temperature)?;
    let unit = setup.time_unit();
    let exact = setup.t_dec_exact(0.0, 1.0)?;
    let inter = setup.t_dec_interaction(0.0, 1.0)?;
    let markov = if zero_temperature {
        setup.t_dec_zero_t_markov(0.0, 1.0)
    } else {
        setup.t_dec_markov(0.0, 1.0)
    };
    let (tau_markov, markov_valid) = match markov {
        Ok(a) => (a.t_dec / unit, a.regime_valid),
        Err(Error::Iteration(_)) => (f64::NAN, false),
        Err(e) => return Err(e),
    };
    Ok(SweepPoint {
        tau_ent,
        eta,
        tau_dec: exact / unit,
        tau_interaction: inter.t_dec / unit,
        tau_markov,
        interaction_valid: inter.regime_valid,
        markov_valid,
    })
}

/// Total Markov-regime growth exponent of `D_t^peak`: `2α+1` (Ohmic) or `2α` (super-Ohmic).
pub fn markov_growth_exponent(alpha: u32, m: u32) -> u32 {
    if m == 1 {
        2 * alpha + 1
    } else {
        2 * alpha
    }
}

/// Integral of a real function of `ω` weighted by `Re ĥ`, exposed for diagnostics.
pub fn spectral_average<F: FnMut(f64) -> f64>(bath: &SpectralBath, mut f: F) -> Result<f64> {
    gaussian_tail_quad(|w| bath.re_h_hat(w) * f(w), bath.w_d(), bath.quadrature())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin_setup(alpha: u32, m: u32, beta: f64) -> MeasurementSetup {
        let bath = SpectralBath::new(m, 0.3, 4.0, beta).unwrap();
        let pointer = PointerSpec::pure(0.1, 1.0, 1.0).unwrap();
        MeasurementSetup::new(1.5, alpha, ObjectSpec::spin_half(), pointer, bath, Variant::PartialEquilibrium).unwrap()
    }

    #[test]
    fn c_alpha_examples() {
        assert_eq!(c_alpha(0.3, -2.0, 1).unwrap(), 1.0);
        assert!((c_alpha(1.0, 3.0, 2).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(c_alpha(1.0, -1.0, 2).unwrap(), 0.0);
        assert!(c_alpha(1.0, 1.0, 2).is_err());
    }

    #[test]
    fn object_validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.6, 0.0)]);
        assert!(ObjectSpec::new(vec![0.0, 1.0], bad, None).is_err());
        assert!(ObjectSpec::pure(vec![1.0, 1.0], &[Complex64::new(1.0, 0.0); 2]).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[Complex64::new(1.2, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-0.2, 0.0)]);
        assert!(ObjectSpec::new(vec![0.0, 1.0], neg, None).is_err());
    }

    #[test]
    fn pointer_validation() {
        assert!(PointerSpec::new(1.0, 4.0 * PI + 0.1, 1.0, 1.0, None).is_err());
        assert!(PointerSpec::pure(1.0, 1.0, 1.0).unwrap().is_minimum_uncertainty());
    }

    #[test]
    fn trivial_exponents() {
        let setup = spin_setup(1, 3, 1.0);
        let r = setup.d_exponent(0.1, 0.2, -0.5, 0.5, 0.0).unwrap();
        assert_eq!((r.d, r.phi), (0.0, 0.0));
        let r = setup.d_exponent(0.3, 0.3, 0.5, 0.5, 2.0).unwrap();
        assert_eq!(r.d, 0.0);
        assert_eq!(setup.d_peak(-0.5, 0.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn peak_equals_exponent_at_origin() {
        for alpha in [1, 2, 3] {
            let setup = spin_setup(alpha, 1, 1.0);
            let (s, sp) = (-0.5, if alpha % 2 == 0 { 1.5 } else { 0.5 });
            for &t in &[0.01, 0.3, 4.0] {
                let a = setup.d_peak(s, sp, t).unwrap();
                let b = setup.d_exponent(0.0, 0.0, s, sp, t).unwrap().d;
                assert!((a - b).abs() <= 1e-10 * a, "alpha={alpha} t={t}");
            }
        }
    }

    #[test]
    fn small_time_limit_matches_frozen_bath() {
        let setup = spin_setup(2, 3, 1.0);
        let t = 1e-4;
        let d = setup.d_peak(-0.5, 1.0, t).unwrap();
        let gap: f64 = 1.0 - 0.25;
        let frozen = 0.5 * setup.epsilon.powi(4) * gap * gap * setup.bath.b_variance() * (t.powi(3) / 3.0).powi(2);
        assert!((d - frozen).abs() <= 1e-6 * frozen);
    }

    #[test]
    fn t_ent_and_class() {
        let bath = SpectralBath::new(1, 1.0, 1.0, 1.0).unwrap();
        let pointer = PointerSpec::new(0.1, 0.5, 1.0, 1.0, Some(1.0)).unwrap();
        let setup = MeasurementSetup::new(1.0, 1, ObjectSpec::spin_half(), pointer, bath.clone(), Variant::PartialEquilibrium).unwrap();
        assert!((setup.t_ent_global().unwrap() - 0.1).abs() < 1e-15);
        assert!((setup.t_ent(0.0, 1.0).unwrap() - 0.1).abs() < 1e-15);
        assert!((setup.t_class().unwrap() - 1.0).abs() < 1e-15);
        assert!((setup.t_class().unwrap() / setup.t_ent_global().unwrap() - 10.0).abs() < 1e-12);
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::new(0.5, 0.0); 2]));
        let obj = ObjectSpec::new(vec![-0.5, 0.5], diag, None).unwrap();
        let pointer = PointerSpec::pure(0.1, 1.0, 1.0).unwrap();
        let setup = MeasurementSetup::new(1.0, 1, obj, pointer, bath, Variant::PartialEquilibrium).unwrap();
        assert!(setup.t_ent_global().is_err());
        assert!(matches!(setup.t_class(), Err(Error::Config(_))));
    }

    #[test]
    fn eta_examples() {
        let bath = SpectralBath::new(1, 1.0, 2.0, 0.1).unwrap();
        let bath = bath.scaled(1.0 / bath.b_variance()).unwrap();
        let pointer = PointerSpec::pure(1.0, 1.0, 1.0).unwrap();
        let setup = MeasurementSetup::new(1.0, 1, ObjectSpec::spin_half(), pointer.clone(), bath, Variant::PartialEquilibrium).unwrap();
        assert!((setup.eta() - 0.1).abs() < 1e-12);
        let bath = SpectralBath::new(1, 1.0, 2.0, f64::INFINITY).unwrap();
        let bath = bath.scaled(4.0 / bath.b_variance()).unwrap();
        let setup = MeasurementSetup::new(1.0, 1, ObjectSpec::spin_half(), pointer, bath, Variant::PartialEquilibrium).unwrap();
        assert!((setup.eta() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interaction_asymptote_example() {
        let setup = MeasurementSetup::dimensionless(1, 3, 0.1, 0.01, 5.0, false).unwrap();
        let t = setup.t_dec_interaction(0.0, 1.0).unwrap().t_dec;
        assert!((t - 2f64.powf(0.75) * 0.1f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn decoherence_free_pairs() {
        let setup = spin_setup(2, 3, 1.0);
        assert!(matches!(setup.t_dec_exact(-0.5, 0.5), Err(Error::DecoherenceFree { .. })));
        assert_eq!(setup.d_peak(-0.5, 0.5, 3.0).unwrap(), 0.0);
        assert_eq!(setup.d_peak_rate(-0.5, 0.5, 3.0).unwrap(), 0.0);
        assert!(matches!(setup.measurement_t_dec(), Err(Error::DecoherenceFree { .. })));
        let bath = SpectralBath::new(1, 1.0, 1.0, 1.0).unwrap();
        let pointer = PointerSpec::pure(0.1, 1.0, 1.0).unwrap();
        let setup = MeasurementSetup::new(1.0, 2, ObjectSpec::spin_half(), pointer, bath, Variant::PartialEquilibrium).unwrap();
        let dc = setup.direct_coupling_t_dec(-0.5, 0.5).unwrap();
        assert!(dc.t_dec_direct.is_infinite());
    }

    #[test]
    fn exact_root_satisfies_definition() {
        let setup = spin_setup(1, 3, 1.0);
        let t = setup.t_dec_exact(-0.5, 0.5).unwrap();
        assert!((setup.d_peak(-0.5, 0.5, t).unwrap() - 1.0).abs() <= 1e-8);
        let m = setup.measurement_t_dec().unwrap();
        assert_eq!(m.t_dec, t);
    }

    #[test]
    fn kernel_matches_direct_evaluation() {
        let setup = spin_setup(2, 1, 0.7);
        for &t in &[0.05, 0.8, -0.6] {
            let k = setup.kernel(t).unwrap();
            for &(x, xp, s, sp) in &[(0.01, -0.03, -0.5, 0.5), (0.2, 0.1, 0.5, 0.5), (0.0, 0.0, -0.5, 1.5)] {
                let a = setup.d_exponent(x, xp, s, sp, t).unwrap();
                let b = k.eval(x, xp, s, sp);
                assert!((a.d - b.d).abs() <= 1e-8 * a.d.max(1e-12), "D t={t}: {} vs {}", a.d, b.d);
                assert!((a.phi - b.phi).abs() <= 1e-8 * a.phi.abs().max(1e-12), "phi t={t}: {} vs {}", a.phi, b.phi);
            }
        }
    }

    #[test]
    fn k_constants() {
        assert!((k_one() - 0.2886).abs() < 5e-4);
        for alpha in [2, 3] {
            let numeric = ohmic_log_constant_at(alpha, 4000.0).unwrap();
            assert!((numeric - k_alpha(alpha)).abs() < 1e-3, "alpha={alpha}: {numeric}");
        }
    }

    #[test]
    fn weighted_phase_branches_agree() {
        for alpha in 1..=4u32 {
            let switch = (alpha as f64).max(1.0);
            for &z in &[0.5 * switch, 0.999 * switch, 1.001 * switch, 2.0 * switch] {
                let exact = {
                    let spec = QuadratureSpec { rel_tol: 1e-13, abs_tol: 0.0, ..Default::default() };
                    let re = integrate(|u| (1.0 - u).powi(alpha as i32 - 1) * (z * u).cos(), 0.0, 1.0, 4, &spec).unwrap();
                    let im = integrate(|u| (1.0 - u).powi(alpha as i32 - 1) * (z * u).sin(), 0.0, 1.0, 4, &spec).unwrap();
                    Complex64::new(re, im)
                };
                let v = weighted_phase_integral(alpha, z);
                assert!((v - exact).norm() < 1e-12, "alpha={alpha} z={z}");
            }
        }
    }
}
