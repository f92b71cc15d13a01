//! Object-pointer density-matrix elements, the equilibrium-apparatus
//! functions `R_0`, `R_t`, `g_t`, and pointer observables on grids.
//!
//! Object states are addressed by index into [`ObjectSpec::eigenvalues`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bath::SpectralBath;
use crate::decoherence::{DecoherenceKernel, MeasurementSetup, PointerSpec, Variant, COHERENCE_FLOOR, MAX_TERMS};
use crate::error::{Error, Result};
use crate::numerics::{integrate, integrate_vec, QuadratureSpec};

/// Default number of grid points for assembled states.
pub const DEFAULT_GRID_POINTS: usize = 257;

/// `⟨x|ρ_P|x'⟩ = (2πΔ²)^{-1/2} e^{-(x+x')²/(8Δ²)} e^{-2π²(x−x')²/λ²}`.
pub fn pointer_density(pointer: &PointerSpec, x: f64, x_prime: f64) -> f64 {
    let d = pointer.delta;
    let sum = x + x_prime;
    let diff = x - x_prime;
    (2.0 * PI * d * d).powf(-0.5) * (-sum * sum / (8.0 * d * d) - 2.0 * PI * PI * diff * diff / pointer.lambda.powi(2)).exp()
}

fn check_indices(setup: &MeasurementSetup, i: usize, j: usize) -> Result<(f64, f64)> {
    let ev = setup.object.eigenvalues();
    match (ev.get(i), ev.get(j)) {
        (Some(&s), Some(&sp)) => Ok((s, sp)),
        _ => Err(Error::Domain(format!("object index ({i}, {j}) out of range for {} levels", ev.len()))),
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be finite and non-negative, got {t}")));
    }
    Ok(())
}

/// Element of the object-pointer state with no bath: the pointer only shifts by `tεs`.
pub fn premeasurement_element(setup: &MeasurementSetup, x: f64, x_prime: f64, i: usize, j: usize, t: f64) -> Result<Complex64> {
    check_time(t)?;
    let (s, sp) = check_indices(setup, i, j)?;
    let shift = t * setup.epsilon;
    Ok(setup.object.rho_at(i, j, t) * pointer_density(&setup.pointer, x - shift * s, x_prime - shift * sp))
}

/// Static-bath exponent `(t−t0)²/t_dec(x,x')²`.
pub fn sequential_exponent(x: f64, x_prime: f64, t: f64, t0: f64, b_var: f64, alpha: u32) -> Result<f64> {
    if t < t0 {
        return Err(Error::Domain(format!("sequential model needs t >= t0, got t = {t}, t0 = {t0}")));
    }
    let td = sequential_t_dec(x, x_prime, b_var, alpha);
    if td.is_infinite() {
        return Ok(0.0);
    }
    Ok(((t - t0) / td).powi(2))
}

/// `√2 / (|x'^α − x^α| ⟨B²⟩^{1/2})`; infinite when `x'^α = x^α`.
pub fn sequential_t_dec(x: f64, x_prime: f64, b_var: f64, alpha: u32) -> f64 {
    let a = alpha as i32;
    let gap = (x_prime.powi(a) - x.powi(a)).abs();
    if gap == 0.0 || b_var == 0.0 {
        return f64::INFINITY;
    }
    2f64.sqrt() / (gap * b_var.sqrt())
}

/// Element `⟨s,x|ρ_PS(t)|s',x'⟩` for the partial-equilibrium initial state.
pub fn rho_ps_element_partial(setup: &MeasurementSetup, x: f64, x_prime: f64, i: usize, j: usize, t: f64) -> Result<Complex64> {
    if setup.variant != Variant::PartialEquilibrium {
        return Err(Error::Domain("rho_ps_element_partial needs the partial-equilibrium variant".into()));
    }
    check_time(t)?;
    let (s, sp) = check_indices(setup, i, j)?;
    let shift = t * setup.epsilon;
    let (xs, xps) = (x - shift * s, x_prime - shift * sp);
    let dec = setup.d_exponent(xs, xps, s, sp, t)?;
    let base = setup.object.rho_at(i, j, t) * pointer_density(&setup.pointer, xs, xps);
    Ok(base * Complex64::new(-dec.d, -dec.phi).exp())
}

/// Pointer potential renormalized by the bath: `v2 x²/2 − γ0 x^{2α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePotential {
    pub v2: f64,
    pub gamma0: f64,
    pub alpha: u32,
}

impl EffectivePotential {
    pub fn new(pointer: &PointerSpec, bath: &SpectralBath, alpha: u32) -> Result<Self> {
        Self::from_parts(pointer.v2, bath.gamma0(), alpha)
    }

    pub fn from_parts(v2: f64, gamma0: f64, alpha: u32) -> Result<Self> {
        if alpha == 0 {
            return Err(Error::Domain("alpha must be at least 1".into()));
        }
        if alpha == 1 && 2.0 * gamma0 >= v2 {
            return Err(Error::Stability(format!("2 gamma0 = {} >= v2 = {v2}: effective potential is unbounded", 2.0 * gamma0)));
        }
        Ok(Self { v2, gamma0, alpha })
    }

    pub fn value(&self, x: f64) -> f64 {
        0.5 * self.v2 * x * x - self.gamma0 * x.powi(2 * self.alpha as i32)
    }

    /// Position of the right maximum for `α > 1`; `None` for a confining well.
    pub fn x_max(&self) -> Option<f64> {
        if self.alpha == 1 || self.gamma0 <= 0.0 {
            return None;
        }
        let a = self.alpha as f64;
        Some((self.v2 / (2.0 * a * self.gamma0)).powf(1.0 / (2.0 * a - 2.0)))
    }

    /// Distance between the two maxima.
    pub fn w_eff(&self) -> Option<f64> {
        self.x_max().map(|x| 2.0 * x)
    }

    pub fn barrier_height(&self) -> Option<f64> {
        self.x_max().map(|x| self.value(x))
    }

    /// `V_eff''(0)`.
    pub fn curvature(&self) -> f64 {
        if self.alpha == 1 {
            self.v2 - 2.0 * self.gamma0
        } else {
            self.v2
        }
    }

    /// `∫ e^{-βV_eff}` over the whole line (`α = 1`) or between the maxima.
    pub fn partition(&self, beta: f64, spec: &QuadratureSpec) -> Result<f64> {
        match self.x_max() {
            None => Ok((2.0 * PI / (beta * self.curvature())).sqrt()),
            Some(xm) => integrate(|x| (-beta * self.value(x)).exp(), -xm, xm, 16, spec),
        }
    }

    fn contains(&self, x: f64) -> bool {
        self.x_max().is_none_or(|xm| x.abs() <= xm)
    }
}

/// `V_eff(x)`; errors when `α = 1` and the well is unstable.
pub fn effective_potential(pointer: &PointerSpec, bath: &SpectralBath, alpha: u32, x: f64) -> Result<f64> {
    Ok(EffectivePotential::new(pointer, bath, alpha)?.value(x))
}

fn require_equilibrium(setup: &MeasurementSetup) -> Result<()> {
    if setup.variant != Variant::EquilibriumApparatus {
        return Err(Error::Domain("operation needs the equilibrium-apparatus variant".into()));
    }
    Ok(())
}

/// Cached equilibrium quantities for one setup.
#[derive(Debug, Clone)]
struct EquilibriumState {
    potential: EffectivePotential,
    beta: f64,
    lambda: f64,
    z_eff: f64,
}

impl EquilibriumState {
    fn new(setup: &MeasurementSetup) -> Result<Self> {
        require_equilibrium(setup)?;
        let potential = EffectivePotential::new(&setup.pointer, &setup.bath, setup.alpha)?;
        let beta = setup.bath.beta();
        let z_eff = potential.partition(beta, setup.bath.quadrature())?;
        Ok(Self { potential, beta, lambda: setup.pointer.lambda, z_eff })
    }

    /// `R_0(x,x')`, zero outside the regularized well.
    fn envelope(&self, x: f64, x_prime: f64) -> f64 {
        if !self.potential.contains(x) || !self.potential.contains(x_prime) {
            return 0.0;
        }
        let v = self.potential.value(x) + self.potential.value(x_prime);
        let diff = x_prime - x;
        (-0.5 * self.beta * v - 2.0 * PI * PI * diff * diff / self.lambda.powi(2)).exp() / self.z_eff
    }

    fn b(&self, x: f64, x_prime: f64) -> f64 {
        (8.0 * PI * PI).sqrt() * (x + x_prime) / self.lambda
    }
}

/// `R_0(x,x') = Z_eff^{-1} e^{-β(V_eff(x)+V_eff(x'))/2} e^{-2π²(x'−x)²/λ_th²}`.
///
/// For `α > 1` the well is regularized between the maxima of `V_eff`, and
/// `R_0` vanishes outside it.
pub fn r0_density(setup: &MeasurementSetup, x: f64, x_prime: f64) -> Result<f64> {
    Ok(EquilibriumState::new(setup)?.envelope(x, x_prime))
}

/// `∫₀¹ γ(tu) u^k du` for `k = 0..=α`.
fn gamma_moments(bath: &SpectralBath, alpha: u32, t: f64) -> Result<[f64; MAX_TERMS]> {
    let mut out = [0.0; MAX_TERMS];
    if t == 0.0 {
        return Ok(out);
    }
    let n = alpha as usize + 1;
    let spec = bath.quadrature();
    let u_max = (2.0 * (spec.gaussian_cutoff(1.0) + 1.0) / (bath.w_d() * t.abs())).min(1.0);
    let spec = QuadratureSpec { abs_tol: 0.0, ..*spec };
    let v = integrate_vec(
        |u, o: &mut [f64]| {
            let g = bath.gamma_t_closed(t * u);
            let mut p = 1.0;
            for slot in o.iter_mut() {
                *slot = g * p;
                p *= u;
            }
        },
        0.0,
        u_max,
        n,
        8,
        &spec,
    )?;
    out[..n].copy_from_slice(&v);
    Ok(out)
}

fn g_from_moments(setup: &MeasurementSetup, moments: &[f64; MAX_TERMS], x: f64, x_prime: f64, s: f64, s_prime: f64, t: f64) -> f64 {
    let f = setup.difference_coeffs(x, x_prime, s, s_prime, t);
    let n = setup.alpha as usize + 1;
    let integral: f64 = t * (0..n).map(|k| f[k] * moments[k]).sum::<f64>();
    let a = setup.alpha as i32;
    (8.0 * PI * PI).powf(-0.5 * a as f64) * setup.pointer.lambda.powi(a) * integral
}

/// `g_t = (8π²)^{-α/2} λ_th^α ∫₀^t γ(τ) [(x' + τεs')^α − (x + τεs)^α] dτ`.
pub fn g_t(setup: &MeasurementSetup, x: f64, x_prime: f64, s: f64, s_prime: f64, t: f64) -> Result<f64> {
    require_equilibrium(setup)?;
    let moments = gamma_moments(&setup.bath, setup.alpha, t)?;
    Ok(g_from_moments(setup, &moments, x, x_prime, s, s_prime, t))
}

/// `π^{-1/2} ∫ dη e^{-η²} e^{-2ig(b/2+η)^α}` in closed form for `α ∈ {1, 2}`.
fn xi_integral_closed(alpha: u32, b: f64, g: f64) -> Option<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    match alpha {
        1 => Some((-g * g - i * g * b).exp()),
        2 => {
            let q = Complex64::new(1.0, 2.0 * g);
            Some(q.sqrt().inv() * (-(g * g * b * b) / q - i * (0.5 * g * b * b)).exp())
        }
        _ => None,
    }
}

fn xi_integral_numeric(alpha: u32, b: f64, g: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    if g == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let a = alpha as i32;
    let half = spec.gaussian_cutoff(1.0);
    let c = 0.5 * b;
    let phase_span = 2.0 * g.abs() * ((c.abs() + half).powi(a) - 0.0);
    let pieces = ((phase_span / PI).ceil() as usize).clamp(8, 100_000);
    let spec = QuadratureSpec { abs_tol: spec.abs_tol.min(1e-15), ..*spec };
    let v = integrate_vec(
        |eta, o: &mut [f64]| {
            let z = Complex64::new(-eta * eta, -2.0 * g * (c + eta).powi(a)).exp();
            o[0] = z.re;
            o[1] = z.im;
        },
        -half,
        half,
        2,
        pieces,
        &spec,
    )?;
    Ok(Complex64::new(v[0], v[1]) / PI.sqrt())
}

/// `R_t` from the general `ξ` integral, for any `α`.
pub fn r_t_numeric(setup: &MeasurementSetup, x: f64, x_prime: f64, s: f64, s_prime: f64, t: f64) -> Result<Complex64> {
    let eq = EquilibriumState::new(setup)?;
    let g = g_t(setup, x, x_prime, s, s_prime, t)?;
    let env = eq.envelope(x, x_prime);
    if env == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(env * xi_integral_numeric(setup.alpha, eq.b(x, x_prime), g, setup.bath.quadrature())?)
}

/// `R_t(x,x';s,s')`: closed form for `α ≤ 2`, otherwise the numeric `ξ` integral.
pub fn r_t(setup: &MeasurementSetup, x: f64, x_prime: f64, s: f64, s_prime: f64, t: f64) -> Result<Complex64> {
    if setup.alpha > 2 {
        return r_t_numeric(setup, x, x_prime, s, s_prime, t);
    }
    let eq = EquilibriumState::new(setup)?;
    let g = g_t(setup, x, x_prime, s, s_prime, t)?;
    let xi = xi_integral_closed(setup.alpha, eq.b(x, x_prime), g).expect("alpha <= 2");
    Ok(eq.envelope(x, x_prime) * xi)
}

/// Element `⟨s,x|ρ_PS(t)|s',x'⟩` for the equilibrium-apparatus initial state.
pub fn rho_ps_element_equilibrium(setup: &MeasurementSetup, x: f64, x_prime: f64, i: usize, j: usize, t: f64) -> Result<Complex64> {
    require_equilibrium(setup)?;
    check_time(t)?;
    let (s, sp) = check_indices(setup, i, j)?;
    let shift = t * setup.epsilon;
    let (xs, xps) = (x - shift * s, x_prime - shift * sp);
    let r = r_t(setup, xs, xps, s, sp, t)?;
    if r == Complex64::new(0.0, 0.0) {
        return Ok(r);
    }
    let dec = setup.d_exponent(xs, xps, s, sp, t)?;
    Ok(setup.object.rho_at(i, j, t) * r * Complex64::new(-dec.d, -dec.phi).exp())
}

/// Evaluates many elements at one time, sharing the decoherence kernel and
/// the equilibrium caches.
#[derive(Debug, Clone)]
pub struct ElementEvaluator<'a> {
    setup: &'a MeasurementSetup,
    t: f64,
    kernel: DecoherenceKernel,
    equilibrium: Option<(EquilibriumState, [f64; MAX_TERMS])>,
}

impl<'a> ElementEvaluator<'a> {
    pub fn new(setup: &'a MeasurementSetup, t: f64) -> Result<Self> {
        check_time(t)?;
        let kernel = setup.kernel(t)?;
        let equilibrium = match setup.variant {
            Variant::PartialEquilibrium => None,
            Variant::EquilibriumApparatus => {
                Some((EquilibriumState::new(setup)?, gamma_moments(&setup.bath, setup.alpha, t)?))
            }
        };
        Ok(Self { setup, t, kernel, equilibrium })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn element(&self, x: f64, x_prime: f64, i: usize, j: usize) -> Result<Complex64> {
        let (s, sp) = check_indices(self.setup, i, j)?;
        let rho = self.setup.object.rho_at(i, j, self.t);
        if rho.norm() <= COHERENCE_FLOOR {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let shift = self.t * self.setup.epsilon;
        let (xs, xps) = (x - shift * s, x_prime - shift * sp);
        let pointer = match &self.equilibrium {
            None => Complex64::new(pointer_density(&self.setup.pointer, xs, xps), 0.0),
            Some((eq, moments)) => {
                let env = eq.envelope(xs, xps);
                if env == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let g = g_from_moments(self.setup, moments, xs, xps, s, sp, self.t);
                let b = eq.b(xs, xps);
                let xi = match xi_integral_closed(self.setup.alpha, b, g) {
                    Some(v) => v,
                    None => xi_integral_numeric(self.setup.alpha, b, g, self.setup.bath.quadrature())?,
                };
                env * xi
            }
        };
        let dec = self.kernel.eval(xs, xps, s, sp);
        Ok(rho * pointer * Complex64::new(-dec.d, -dec.phi).exp())
    }

    /// `ρ_P(x,x') = Σ_s ⟨s,x|ρ_PS|s,x'⟩`.
    pub fn pointer_element(&self, x: f64, x_prime: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.setup.object.len() {
            acc += self.element(x, x_prime, i, i)?;
        }
        Ok(acc)
    }
}

/// Object-pointer state on a position grid. Pairs absent from `elements`
/// have coherence below [`COHERENCE_FLOOR`] and vanish identically.
#[derive(Debug, Clone)]
pub struct GridState {
    pub x_grid: Vec<f64>,
    pub elements: BTreeMap<(usize, usize), DMatrix<Complex64>>,
    pub t: f64,
}

fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let h = 0.5 * (grid[k + 1] - grid[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}

impl GridState {
    /// Diagonal `⟨s_i,x|ρ_PS|s_i,x⟩` as a real density on the grid.
    pub fn diagonal_density(&self, i: usize) -> Option<Vec<f64>> {
        self.elements.get(&(i, i)).map(|m| (0..m.nrows()).map(|k| m[(k, k)].re).collect())
    }

    /// `Σ_i ∫ ⟨s_i,x|ρ_PS|s_i,x⟩ dx` by the trapezoid rule.
    pub fn trace(&self) -> f64 {
        let w = trapezoid_weights(&self.x_grid);
        self.elements
            .iter()
            .filter(|((i, j), _)| i == j)
            .map(|(_, m)| (0..m.nrows()).map(|k| w[k] * m[(k, k)].re).sum::<f64>())
            .sum()
    }

    /// Largest deviation from `elements[(i,j)](x,x') = conj(elements[(j,i)](x',x))`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (&(i, j), m) in &self.elements {
            if let Some(other) = self.elements.get(&(j, i)) {
                worst = worst.max((m - other.adjoint()).iter().fold(0.0f64, |a, z| a.max(z.norm())));
            }
        }
        worst
    }

    /// Reduced pointer state `Σ_i ⟨s_i,·|ρ_PS|s_i,·⟩`.
    pub fn pointer_reduced(&self) -> DMatrix<Complex64> {
        let n = self.x_grid.len();
        let mut out = DMatrix::zeros(n, n);
        for ((i, j), m) in &self.elements {
            if i == j {
                out += m;
            }
        }
        out
    }

    /// Largest `|element|` over off-diagonal object pairs.
    pub fn max_coherence(&self) -> f64 {
        self.elements
            .iter()
            .filter(|((i, j), _)| i != j)
            .map(|(_, m)| m.iter().fold(0.0f64, |a, z| a.max(z.norm())))
            .fold(0.0, f64::max)
    }

    /// Largest diagonal value over diagonal object blocks.
    pub fn max_diagonal(&self) -> f64 {
        self.elements
            .iter()
            .filter(|((i, j), _)| i == j)
            .map(|(_, m)| (0..m.nrows()).map(|k| m[(k, k)].re).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

/// `n` points spanning `[min(0, εt s_min) − 4Δ, max(0, εt s_max) + 4Δ]`.
pub fn default_grid(setup: &MeasurementSetup, t: f64, n: usize) -> Vec<f64> {
    let ev = setup.object.eigenvalues();
    let shift = t * setup.epsilon;
    let lo = ev.iter().fold(0.0f64, |m, s| m.min(shift * s)) - 4.0 * setup.pointer.delta;
    let hi = ev.iter().fold(0.0f64, |m, s| m.max(shift * s)) + 4.0 * setup.pointer.delta;
    let n = n.max(2);
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn check_grid(name: &str, grid: &[f64], width: f64) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::Domain(format!("{name} grid needs at least 3 points")));
    }
    let mut max_step = 0.0f64;
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Domain(format!("{name} grid must be strictly increasing")));
        }
        max_step = max_step.max(w[1] - w[0]);
    }
    if width < 2.0 * max_step {
        return Err(Error::Resolution(format!(
            "{name} grid step {max_step:e} is too coarse for peak width {width:e} (need at least 2 steps per width)"
        )));
    }
    Ok(())
}

/// Assembles all non-negligible `⟨s_i,x|ρ_PS(t)|s_j,x'⟩` on `x_grid`.
pub fn evolve(setup: &MeasurementSetup, t: f64, x_grid: &[f64]) -> Result<GridState> {
    check_grid("x", x_grid, setup.pointer.delta)?;
    let eval = ElementEvaluator::new(setup, t)?;
    let n = x_grid.len();
    let levels = setup.object.len();
    let mut elements = BTreeMap::new();
    for i in 0..levels {
        for j in i..levels {
            if setup.object.rho()[(i, j)].norm() <= COHERENCE_FLOOR {
                continue;
            }
            let mut m = DMatrix::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    m[(a, b)] = eval.element(x_grid[a], x_grid[b], i, j)?;
                }
            }
            if i != j {
                elements.insert((j, i), m.adjoint());
            }
            elements.insert((i, j), m);
        }
    }
    Ok(GridState { x_grid: x_grid.to_vec(), elements, t })
}

/// Reduced pointer density matrix `ρ_P(x,x';t)` on `x_grid`.
pub fn pointer_reduced(setup: &MeasurementSetup, t: f64, x_grid: &[f64]) -> Result<DMatrix<Complex64>> {
    check_grid("x", x_grid, setup.pointer.delta)?;
    let eval = ElementEvaluator::new(setup, t)?;
    let n = x_grid.len();
    let mut m = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = eval.pointer_element(x_grid[a], x_grid[b])?;
            m[(a, b)] = v;
            m[(b, a)] = v.conj();
        }
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub x_grid: Vec<f64>,
    pub p_grid: Vec<f64>,
    /// `w[(ix, ip)] = W_P(x_grid[ix], p_grid[ip])`.
    pub w: DMatrix<f64>,
}

impl WignerGrid {
    /// `∫∫ W dx dp` by the trapezoid rule.
    pub fn integral(&self) -> f64 {
        let wx = DVector::from_vec(trapezoid_weights(&self.x_grid));
        let wp = DVector::from_vec(trapezoid_weights(&self.p_grid));
        wx.dot(&(&self.w * wp))
    }

    pub fn max(&self) -> f64 {
        self.w.max()
    }

    /// `W` scaled to unit maximum.
    pub fn normalized(&self) -> DMatrix<f64> {
        let m = self.max();
        if m > 0.0 {
            &self.w / m
        } else {
            self.w.clone()
        }
    }

    /// `∫ W dp` on the x grid.
    pub fn position_marginal(&self) -> Vec<f64> {
        let wp = DVector::from_vec(trapezoid_weights(&self.p_grid));
        (&self.w * wp).iter().copied().collect()
    }
}

/// Momentum interval `[p_lo, p_hi]` covering the Wigner function of the
/// pointer at time `t`: `n_sigma` local widths around the mean momentum near
/// each populated peak. The bath both spreads and drifts the momentum, so
/// the width is read off the decay of `ρ_P(x−y, x+y)` in `y` and the mean
/// off its phase slope.
pub fn momentum_window(setup: &MeasurementSetup, t: f64, n_sigma: f64) -> Result<(f64, f64)> {
    let eval = ElementEvaluator::new(setup, t)?;
    let sigma_y0 = setup.pointer.lambda / (4.0 * PI);
    let delta = setup.pointer.delta;
    let shift = t * setup.epsilon;
    let ev = setup.object.eigenvalues();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, &s) in ev.iter().enumerate() {
        if setup.object.rho_at(i, i, t).norm() <= COHERENCE_FLOOR {
            continue;
        }
        for x in [shift * s - 3.0 * delta, shift * s, shift * s + 3.0 * delta] {
            let r0 = eval.element(x, x, i, i)?;
            if r0.norm() == 0.0 {
                continue;
            }
            let dy = 1e-4 * sigma_y0;
            let mean = -(eval.element(x - dy, x + dy, i, i)? / r0).arg() / (2.0 * dy);
            let mut sigma_y = sigma_y0;
            for f in [0.05, 0.1, 0.25, 0.5, 1.0] {
                let y = f * sigma_y0;
                let ratio = eval.element(x - y, x + y, i, i)?.norm() / r0.norm();
                if ratio > 0.0 && ratio < 1.0 {
                    sigma_y = sigma_y.min(y / (-2.0 * ratio.ln()).sqrt());
                } else if ratio == 0.0 {
                    sigma_y = sigma_y.min(y / 10.0);
                }
            }
            let spread = n_sigma / (2.0 * sigma_y);
            lo = lo.min(mean - spread);
            hi = hi.max(mean + spread);
        }
    }
    if !(lo < hi) {
        return Err(Error::Domain("pointer state vanishes on its expected support".into()));
    }
    Ok((lo, hi))
}

/// `W_P(x,p;t) = π^{-1} ∫ dy e^{2ipy} ρ_P(x−y, x+y; t)`.
pub fn wigner(setup: &MeasurementSetup, t: f64, x_grid: &[f64], p_grid: &[f64]) -> Result<WignerGrid> {
    let sigma_p = 2.0 * PI / setup.pointer.lambda;
    check_grid("x", x_grid, setup.pointer.delta)?;
    check_grid("p", p_grid, sigma_p)?;
    let eval = ElementEvaluator::new(setup, t)?;
    let sigma_y = setup.pointer.lambda / (4.0 * PI);
    let p_abs = p_grid.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let y_max = sigma_y * (2.0 * (1e17f64).ln()).sqrt();
    let h = (sigma_y / 4.0).min(if p_abs > 0.0 { PI / (4.0 * p_abs) } else { f64::INFINITY });
    let ny = (y_max / h).ceil() as usize;
    let h = y_max / ny as f64;
    let mut w = DMatrix::zeros(x_grid.len(), p_grid.len());
    let mut row = vec![Complex64::new(0.0, 0.0); 2 * ny + 1];
    for (ix, &x) in x_grid.iter().enumerate() {
        for (k, slot) in row.iter_mut().enumerate() {
            let y = (k as f64 - ny as f64) * h;
            *slot = eval.pointer_element(x - y, x + y)?;
        }
        for (ip, &p) in p_grid.iter().enumerate() {
            let mut acc = 0.0;
            for (k, v) in row.iter().enumerate() {
                let y = (k as f64 - ny as f64) * h;
                acc += (Complex64::new(0.0, 2.0 * p * y).exp() * v).re;
            }
            w[(ix, ip)] = acc * h / PI;
        }
    }
    Ok(WignerGrid { x_grid: x_grid.to_vec(), p_grid: p_grid.to_vec(), w })
}
