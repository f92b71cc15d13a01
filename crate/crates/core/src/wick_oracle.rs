//! Finite bosonic bath in a truncated Fock space, used as a brute-force
//! oracle for the Gaussian (Wick) bath identities.
//!
//! For a bath linear in boson operators Wick's theorem is exact at any `N`,
//! so these checks validate the implementation of the identities rather than
//! the large-`N` limit itself.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest truncated Hilbert-space dimension handled.
pub const MAX_DIMENSION: usize = 4096;
/// Largest order of the pairing sum.
pub const MAX_PAIRING_ORDER: usize = 12;
/// Required bound on `e^{-β ω_min cutoff}`.
pub const TRUNCATION_BOUND: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteBosonBath {
    freqs: Vec<f64>,
    couplings: Vec<Complex64>,
    beta: f64,
    fock_cutoff: usize,
}

/// Piecewise-constant function on the partition `breaks[0] < … < breaks[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::Domain("step function needs one more break than values".into()));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("step function breaks must be strictly increasing".into()));
        }
        Ok(Self { breaks, values })
    }

    pub fn constant(t: f64, value: f64) -> Result<Self> {
        Self::new(vec![0.0, t], vec![value])
    }

    fn same_partition(&self, other: &Self) -> bool {
        self.breaks == other.breaks
    }

    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(j, &v)| (self.breaks[j], self.breaks[j + 1], v))
    }
}

fn thermal_occupation(beta: f64, w: f64) -> f64 {
    1.0 / (beta * w).exp_m1()
}

/// `(e^{cL} − 1 − cL)/c²`, i.e. `∫₀^L dτ₁ ∫₀^{τ₁} dτ₂ e^{c(τ₁−τ₂)}`.
fn triangle(c: Complex64, len: f64) -> Complex64 {
    let z = c * len;
    if z.norm() < 1e-3 {
        let mut term = Complex64::new(0.5 * len * len, 0.0);
        let mut sum = term;
        for k in 3..12 {
            term *= z / k as f64;
            sum += term;
        }
        return sum;
    }
    (z.exp() - 1.0 - z) / (c * c)
}

/// `∫_a^b e^{cτ} dτ`.
fn exp_segment(c: Complex64, a: f64, b: f64) -> Complex64 {
    let z = c * (b - a);
    if z.norm() < 1e-3 {
        let mut term = Complex64::new(b - a, 0.0);
        let mut sum = term;
        for k in 2..12 {
            term *= z / k as f64;
            sum += term;
        }
        return (c * a).exp() * sum;
    }
    ((c * b).exp() - (c * a).exp()) / c
}

impl FiniteBosonBath {
    pub fn new(freqs: Vec<f64>, couplings: Vec<Complex64>, beta: f64, fock_cutoff: usize) -> Result<Self> {
        if freqs.is_empty() || freqs.len() != couplings.len() {
            return Err(Error::Domain("freqs and couplings must be non-empty and of equal length".into()));
        }
        if freqs.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Domain("mode frequencies must be positive".into()));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("beta must be positive and finite, got {beta}")));
        }
        if fock_cutoff < 2 {
            return Err(Error::Domain("fock_cutoff must be at least 2".into()));
        }
        let w_min = freqs.iter().copied().fold(f64::INFINITY, f64::min);
        let tail = (-beta * w_min * fock_cutoff as f64).exp();
        if tail >= TRUNCATION_BOUND {
            return Err(Error::Domain(format!(
                "truncation invalid: exp(-beta*w_min*cutoff) = {tail:e} >= {TRUNCATION_BOUND:e}"
            )));
        }
        Ok(Self { freqs, couplings, beta, fock_cutoff })
    }

    /// Two modes `ω = {1.0, 1.6}` at `β = 3` with cutoff 12.
    ///
    /// At `β = 2` the 6-point function already carries ~1e-6 truncation error.
    pub fn default_oracle() -> Self {
        Self::new(
            vec![1.0, 1.6],
            vec![Complex64::new(0.8, 0.3), Complex64::new(0.5, -0.4)],
            3.0,
            12,
        )
        .expect("valid default bath")
    }

    pub fn modes(&self) -> usize {
        self.freqs.len()
    }
    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }
    pub fn couplings(&self) -> &[Complex64] {
        &self.couplings
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    /// `fock_cutoff^N`, or a resource error above [`MAX_DIMENSION`].
    pub fn dimension(&self) -> Result<usize> {
        let mut d: usize = 1;
        for _ in 0..self.modes() {
            d = d.saturating_mul(self.fock_cutoff);
            if d > MAX_DIMENSION {
                return Err(Error::Resource(format!(
                    "truncated dimension {}^{} exceeds {MAX_DIMENSION}",
                    self.fock_cutoff,
                    self.modes()
                )));
            }
        }
        Ok(d)
    }

    fn norm(&self) -> f64 {
        1.0 / self.modes() as f64
    }

    /// `h(z)` for complex time from the mode sum.
    pub fn exact_h_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, k) in self.freqs.iter().zip(&self.couplings) {
            let n = thermal_occupation(self.beta, *w);
            acc += k.norm_sqr() * ((n + 1.0) * (-I * w * z).exp() + n * (I * w * z).exp());
        }
        acc * self.norm()
    }

    /// `h(t) = N^{-1} Σ |κ|² [(n̄+1) e^{-iωt} + n̄ e^{iωt}]`.
    pub fn exact_h(&self, t: f64) -> Complex64 {
        self.exact_h_complex(Complex64::new(t, 0.0))
    }

    /// `γ(τ) = N^{-1} Σ |κ|² cos(ωτ)/ω`.
    pub fn gamma(&self, tau: f64) -> f64 {
        self.norm() * self.freqs.iter().zip(&self.couplings).map(|(w, k)| k.norm_sqr() * (w * tau).cos() / w).sum::<f64>()
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma(0.0)
    }

    /// Sum over pairings of `Π h(t_i − t_j)` with `i < j` in each pair.
    pub fn npoint_pairing(&self, times: &[f64]) -> Result<Complex64> {
        if times.len() > MAX_PAIRING_ORDER {
            return Err(Error::Resource(format!("pairing order {} exceeds {MAX_PAIRING_ORDER}", times.len())));
        }
        if times.len() % 2 == 1 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let idx: Vec<usize> = (0..times.len()).collect();
        Ok(self.pairings(times, &idx))
    }

    fn pairings(&self, times: &[f64], idx: &[usize]) -> Complex64 {
        if idx.is_empty() {
            return Complex64::new(1.0, 0.0);
        }
        let first = idx[0];
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 1..idx.len() {
            let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|(q, _)| q + 1 != p).map(|(_, &v)| v).collect();
            acc += self.exact_h(times[first] - times[idx[p]]) * self.pairings(times, &rest);
        }
        acc
    }

    fn digit(&self, state: usize, mode: usize) -> usize {
        (state / self.fock_cutoff.pow(mode as u32)) % self.fock_cutoff
    }

    fn thermal_weights(&self, dim: usize) -> Vec<f64> {
        let mut w: Vec<f64> = (0..dim)
            .map(|k| {
                let e: f64 = (0..self.modes()).map(|m| self.freqs[m] * self.digit(k, m) as f64).sum();
                (-self.beta * e).exp()
            })
            .collect();
        let z: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= z);
        w
    }

    /// `out = B̃(t) v` without forming the matrix.
    fn apply_b(&self, t: f64, v: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        let scale = self.norm().sqrt();
        for m in 0..self.modes() {
            let stride = self.fock_cutoff.pow(m as u32);
            let up = self.couplings[m] * (I * self.freqs[m] * t).exp() * scale;
            let down = up.conj();
            for (k, &amp) in v.iter().enumerate() {
                if amp == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let n = self.digit(k, m);
                if n + 1 < self.fock_cutoff {
                    out[k + stride] += up * ((n + 1) as f64).sqrt() * amp;
                }
                if n > 0 {
                    out[k - stride] += down * (n as f64).sqrt() * amp;
                }
            }
        }
    }

    /// `tr(B̃(t₁)⋯B̃(t_n) ρ_eq)` in the truncated space.
    pub fn npoint_numeric(&self, times: &[f64]) -> Result<Complex64> {
        let dim = self.dimension()?;
        let weights = self.thermal_weights(dim);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        let mut tmp = v.clone();
        for (k, &p) in weights.iter().enumerate() {
            if p < 1e-300 {
                continue;
            }
            v.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            v[k] = Complex64::new(1.0, 0.0);
            for &t in times.iter().rev() {
                self.apply_b(t, &v, &mut tmp);
                std::mem::swap(&mut v, &mut tmp);
            }
            acc += p * v[k];
        }
        Ok(acc)
    }

    fn h_bath_diag(&self, dim: usize) -> Vec<f64> {
        (0..dim).map(|k| (0..self.modes()).map(|m| self.freqs[m] * self.digit(k, m) as f64).sum()).collect()
    }

    /// Dense `B̃(t)`.
    pub fn b_matrix(&self, t: f64) -> Result<DMatrix<Complex64>> {
        let dim = self.dimension()?;
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        let mut col = e.clone();
        for k in 0..dim {
            e[k] = Complex64::new(1.0, 0.0);
            self.apply_b(t, &e, &mut col);
            e[k] = Complex64::new(0.0, 0.0);
            for (r, v) in col.iter().enumerate() {
                m[(r, k)] = *v;
            }
        }
        Ok(m)
    }

    /// `f(H)` for Hermitian `H` through its eigendecomposition.
    fn hermitian_fn<F: Fn(f64) -> Complex64>(h: DMatrix<Complex64>, f: F) -> DMatrix<Complex64> {
        let eig = h.symmetric_eigen();
        let d = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&l| f(l)));
        let v = &eig.eigenvectors;
        v * DMatrix::from_diagonal(&d) * v.adjoint()
    }

    fn hamiltonian(&self, y: f64) -> Result<DMatrix<Complex64>> {
        let dim = self.dimension()?;
        let diag = self.h_bath_diag(dim);
        let mut h = self.b_matrix(0.0)? * Complex64::new(y, 0.0);
        for (k, e) in diag.iter().enumerate() {
            h[(k, k)] += *e;
        }
        Ok(h)
    }

    /// Interaction-picture propagator `T exp(−i ∫₀^t l(τ) B̃(τ) dτ)`.
    fn propagator(&self, l: &StepFunction) -> Result<DMatrix<Complex64>> {
        let dim = self.dimension()?;
        let mut u = DMatrix::<Complex64>::identity(dim, dim);
        for (a, b, v) in l.segments() {
            let step = Self::hermitian_fn(self.hamiltonian(v)?, |e| (-I * e * (b - a)).exp());
            u = step * u;
        }
        let t_end = *l.breaks.last().expect("non-empty partition");
        let t_start = l.breaks[0];
        let diag = self.h_bath_diag(dim);
        for (r, e) in diag.iter().enumerate() {
            let left = (I * e * t_end).exp();
            for c in 0..dim {
                u[(r, c)] *= left;
            }
        }
        for (c, e) in diag.iter().enumerate() {
            let right = (-I * e * t_start).exp();
            for r in 0..dim {
                u[(r, c)] *= right;
            }
        }
        Ok(u)
    }

    /// Gibbs state `e^{-β(H_B + y B)}/Z_y` and `Z_y`.
    fn gibbs(&self, y: f64) -> Result<(DMatrix<Complex64>, f64)> {
        let eig = self.hamiltonian(y)?.symmetric_eigen();
        let e_min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = eig.eigenvalues.iter().map(|e| (-self.beta * (e - e_min)).exp()).collect();
        let z: f64 = w.iter().sum();
        let d = DVector::from_iterator(w.len(), w.iter().map(|v| Complex64::new(v / z, 0.0)));
        let v = &eig.eigenvectors;
        Ok((v * DMatrix::from_diagonal(&d) * v.adjoint(), z.ln() - self.beta * e_min))
    }

    /// Closed-form `⟨[T e^{-i∫kB̃}]† T e^{-i∫lB̃}⟩` from the Gaussian exponent.
    pub fn char_functional_closed(&self, k: &StepFunction, l: &StepFunction) -> Result<Complex64> {
        if !k.same_partition(l) {
            return Err(Error::Domain("k and l must share a partition".into()));
        }
        let segs: Vec<(f64, f64, f64, f64)> = k.segments().zip(l.values.iter()).map(|((a, b, kv), &lv)| (a, b, kv, lv)).collect();
        let mut exponent = Complex64::new(0.0, 0.0);
        for (w, kappa) in self.freqs.iter().zip(&self.couplings) {
            let n = thermal_occupation(self.beta, *w);
            let weight = kappa.norm_sqr() * self.norm();
            // h(u) = weight [(n+1) e^{-iωu} + n e^{iωu}]; h(−u) swaps the two exponents.
            let terms = [(-I * w, (n + 1.0) * weight, n * weight), (I * w, n * weight, (n + 1.0) * weight)];
            for &(c, coef_h, coef_hc) in &terms {
                for (p, &(ap, bp, kp, lp)) in segs.iter().enumerate() {
                    let diag = triangle(c, bp - ap);
                    exponent += (kp - lp) * (kp * coef_hc - lp * coef_h) * diag;
                    for &(aq, bq, kq, lq) in &segs[..p] {
                        let rect = exp_segment(c, ap, bp) * exp_segment(-c, aq, bq);
                        exponent += (kp - lp) * (kq * coef_hc - lq * coef_h) * rect;
                    }
                }
            }
        }
        Ok((-exponent).exp())
    }

    /// The same functional by exact propagation in the truncated space.
    pub fn char_functional_numeric(&self, k: &StepFunction, l: &StepFunction) -> Result<Complex64> {
        self.centered_char_functional_numeric(k, l, 0.0)
    }

    /// `⟨[T e^{-i∫k δB̃}]† T e^{-i∫l δB̃}⟩_y` with `δB̃ = B̃ − ⟨B̃⟩_y` and the
    /// average over `e^{-β(H_B + yB)}/Z_y`.
    pub fn centered_char_functional_numeric(&self, k: &StepFunction, l: &StepFunction, y: f64) -> Result<Complex64> {
        if !k.same_partition(l) {
            return Err(Error::Domain("k and l must share a partition".into()));
        }
        let uk = self.propagator(k)?;
        let ul = self.propagator(l)?;
        let (rho, _) = self.gibbs(y)?;
        let trace = (uk.adjoint() * ul * rho).trace();
        // ∫ ⟨B̃(τ)⟩_y dτ over each segment, from ⟨B̃(τ)⟩_y = −2yγ(τ).
        let mut shift = 0.0;
        for ((a, b, kv), &lv) in k.segments().zip(l.values.iter()) {
            let mean_integral: f64 = -2.0
                * y
                * self.norm()
                * self
                    .freqs
                    .iter()
                    .zip(&self.couplings)
                    .map(|(w, kap)| kap.norm_sqr() * ((w * b).sin() - (w * a).sin()) / (w * w))
                    .sum::<f64>();
            shift += (lv - kv) * mean_integral;
        }
        Ok(trace * (I * shift).exp())
    }

    /// Numeric `⟨B̃(τ)⟩_y` in the Gibbs state of `H_B + yB`.
    pub fn shifted_mean_b(&self, y_alpha: f64, tau: f64) -> Result<f64> {
        let (rho, _) = self.gibbs(y_alpha)?;
        Ok((self.b_matrix(tau)? * rho).trace().re)
    }

    /// `−2 y γ(τ)`.
    pub fn shifted_mean_closed(&self, y_alpha: f64, tau: f64) -> f64 {
        -2.0 * y_alpha * self.gamma(tau)
    }

    /// Numeric `Z_y/Z_0`.
    pub fn partition_ratio(&self, y_alpha: f64) -> Result<f64> {
        let (_, ln_zy) = self.gibbs(y_alpha)?;
        let (_, ln_z0) = self.gibbs(0.0)?;
        Ok((ln_zy - ln_z0).exp())
    }

    /// `exp(y² β γ0)`.
    pub fn partition_ratio_closed(&self, y_alpha: f64) -> f64 {
        (y_alpha * y_alpha * self.beta * self.gamma0()).exp()
    }
}

/// One row of the oracle suite.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCase {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
}

impl OracleCase {
    pub fn passed(&self) -> bool {
        self.error <= self.tolerance
    }
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Runs every oracle comparison on `fb`; `times` seeds the n-point cases.
pub fn oracle_suite(fb: &FiniteBosonBath, times: &[f64]) -> Result<Vec<OracleCase>> {
    let mut cases = Vec::new();
    let mut push = |name: String, error: f64, tolerance: f64| cases.push(OracleCase { name, error, tolerance });
    for n in [2usize, 4, 6] {
        let ts: Vec<f64> = times.iter().cycle().take(n).copied().collect();
        let a = fb.npoint_numeric(&ts)?;
        let b = fb.npoint_pairing(&ts)?;
        push(format!("npoint_n{n}"), rel_err(a, b), 1e-6);
    }
    let ts: Vec<f64> = times.iter().cycle().take(3).copied().collect();
    push("npoint_n3_odd".into(), fb.npoint_numeric(&ts)?.norm(), 1e-10);
    let h0 = fb.npoint_numeric(&[times[0], times[0]])?;
    push("h_exact_t0".into(), rel_err(h0, fb.exact_h(0.0)), 1e-8);

    let t = 1.7;
    let breaks = vec![0.0, 0.5, 1.1, t];
    let cases_kl = [
        (vec![0.0, 0.0, 0.0], vec![0.4, 0.4, 0.4]),
        (vec![0.3, -0.2, 0.5], vec![-0.4, 0.1, 0.25]),
    ];
    for (idx, (kv, lv)) in cases_kl.iter().enumerate() {
        let k = StepFunction::new(breaks.clone(), kv.clone())?;
        let l = StepFunction::new(breaks.clone(), lv.clone())?;
        let a = fb.char_functional_numeric(&k, &l)?;
        let b = fb.char_functional_closed(&k, &l)?;
        push(format!("char_functional_{idx}"), rel_err(a, b), 1e-6);
        let y = fb.centered_char_functional_numeric(&k, &l, 0.35)?;
        push(format!("y_independence_{idx}"), rel_err(y, a), 1e-6);
    }
    for &(y, tau) in &[(0.2, 0.0), (0.5, 0.8), (-0.3, 2.1)] {
        let a = fb.shifted_mean_b(y, tau)?;
        let b = fb.shifted_mean_closed(y, tau);
        push(format!("shifted_mean_y{y}_tau{tau}"), (a - b).abs() / b.abs(), 1e-6);
    }
    for &y in &[0.1, 0.3, 0.5] {
        let a = fb.partition_ratio(y)?;
        let b = fb.partition_ratio_closed(y);
        push(format!("partition_ratio_y{y}"), (a - b).abs() / b, 1e-6);
    }
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_h_examples() {
        let fb = FiniteBosonBath::default_oracle();
        let h0 = fb.exact_h(0.0);
        let expect: f64 = 0.5
            * fb.freqs()
                .iter()
                .zip(fb.couplings())
                .map(|(w, k)| k.norm_sqr() / (0.5 * fb.beta() * w).tanh())
                .sum::<f64>();
        assert!((h0.re - expect).abs() < 1e-14 && h0.im == 0.0);
        let single = FiniteBosonBath::new(vec![1.0], vec![Complex64::new(1.0, 0.0)], 200.0, 4).unwrap();
        let t = 0.9;
        assert!((single.exact_h(t) - (-I * t).exp()).norm() < 1e-12);
        for &t in &[0.3, -1.2, 4.0] {
            assert!((fb.exact_h(-t) - fb.exact_h(t).conj()).norm() < 1e-14);
            let kms = fb.exact_h_complex(Complex64::new(-t, -fb.beta()));
            assert!((kms - fb.exact_h(t)).norm() < 1e-12);
        }
    }

    #[test]
    fn pairing_examples() {
        let fb = FiniteBosonBath::default_oracle();
        assert!((fb.npoint_pairing(&[0.4, 1.0]).unwrap() - fb.exact_h(-0.6)).norm() < 1e-15);
        let h0 = fb.exact_h(0.0);
        assert!((fb.npoint_pairing(&[0.2; 4]).unwrap() - 3.0 * h0 * h0).norm() < 1e-13);
        assert_eq!(fb.npoint_pairing(&[0.1, 0.2, 0.3]).unwrap(), Complex64::new(0.0, 0.0));
        assert!(matches!(fb.npoint_pairing(&[0.0; 14]), Err(Error::Resource(_))));
    }

    #[test]
    fn truncation_and_caps() {
        assert!(matches!(
            FiniteBosonBath::new(vec![1.0], vec![Complex64::new(1.0, 0.0)], 0.1, 2),
            Err(Error::Domain(_))
        ));
        let big = FiniteBosonBath::new(vec![1.0; 4], vec![Complex64::new(1.0, 0.0); 4], 2.0, 12).unwrap();
        assert!(matches!(big.npoint_numeric(&[0.0, 0.0]), Err(Error::Resource(_))));
    }

    #[test]
    fn step_function_validation() {
        assert!(StepFunction::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0, 0.5], vec![1.0, 2.0]).is_err());
        let fb = FiniteBosonBath::default_oracle();
        let k = StepFunction::constant(1.0, 0.2).unwrap();
        let l = StepFunction::new(vec![0.0, 0.5, 1.0], vec![0.1, 0.1]).unwrap();
        assert!(matches!(fb.char_functional_closed(&k, &l), Err(Error::Domain(_))));
    }

    #[test]
    fn equal_arguments_give_unity() {
        let fb = FiniteBosonBath::default_oracle();
        let k = StepFunction::new(vec![0.0, 0.7, 1.5], vec![0.3, -0.6]).unwrap();
        let v = fb.char_functional_closed(&k, &k).unwrap();
        assert!((v - 1.0).norm() < 1e-14);
        let v = fb.char_functional_numeric(&k, &k).unwrap();
        assert!((v - 1.0).norm() < 1e-10);
    }

    #[test]
    fn shifted_mean_and_partition_limits() {
        let fb = FiniteBosonBath::default_oracle();
        assert!(fb.shifted_mean_b(0.0, 0.7).unwrap().abs() < 1e-12);
        assert!((fb.partition_ratio(0.0).unwrap() - 1.0).abs() < 1e-12);
        let a = fb.shifted_mean_b(0.2, 0.4).unwrap();
        let b = fb.shifted_mean_b(0.4, 0.4).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-8 * b.abs());
    }

    #[test]
    fn single_mode_displaced_oscillator() {
        let k = Complex64::new(0.7, 0.2);
        let fb = FiniteBosonBath::new(vec![1.3], vec![k], 1.5, 30).unwrap();
        let y: f64 = 0.6;
        let displaced = (fb.beta() * k.norm_sqr() * y * y / 1.3).exp();
        assert!((fb.partition_ratio(y).unwrap() - displaced).abs() < 1e-8 * displaced);
        assert!((fb.partition_ratio_closed(y) - displaced).abs() < 1e-14 * displaced);
    }

    #[test]
    fn default_suite_passes() {
        let fb = FiniteBosonBath::default_oracle();
        for case in oracle_suite(&fb, &[0.3, 1.1, -0.4, 2.0, 0.9, 0.0]).unwrap() {
            assert!(case.passed(), "{}: {:e}", case.name, case.error);
        }
    }
}
