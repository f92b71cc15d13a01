//! Quadrature, closed-form oscillatory moments and monotone root finding.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest |w t| at which the upward recursion replaces the Taylor series.
/// The effective threshold for degree `alpha` is `max(TAYLOR_SWITCH, alpha)`.
pub const TAYLOR_SWITCH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-14, max_subdivisions: 200_000 }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self { rel_tol, abs_tol, max_subdivisions };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) || self.max_subdivisions < 1 {
            return Err(Error::Domain(format!("invalid quadrature spec {self:?}")));
        }
        Ok(())
    }

    /// Upper limit beyond which a factor `exp(-(w/scale)^2)` is below `abs_tol`,
    /// widened by a fixed margin so polynomial prefactors stay negligible.
    pub fn gaussian_cutoff(&self, scale: f64) -> f64 {
        let floor = self.abs_tol.max(1e-300);
        scale * ((1.0 / floor).ln() + 8.0).sqrt()
    }
}

// 21-point Gauss-Kronrod rule with embedded 10-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525545900,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    magnitude: Vec<f64>,
    worst: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.worst == other.worst
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.worst.total_cmp(&other.worst)
    }
}

fn gk21<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    let mut magnitude = vec![0.0; dim];
    f(c, buf);
    for d in 0..dim {
        kron[d] = WGK[10] * buf[d];
        magnitude[d] = WGK[10] * buf[d].abs();
    }
    for j in 0..10 {
        let dx = h * XGK[j];
        for x in [c - dx, c + dx] {
            f(x, buf);
            for d in 0..dim {
                kron[d] += WGK[j] * buf[d];
                magnitude[d] += WGK[j] * buf[d].abs();
                if j % 2 == 1 {
                    gauss[d] += WG[j / 2] * buf[d];
                }
            }
        }
    }
    let mut value = vec![0.0; dim];
    let mut error = vec![0.0; dim];
    let mut worst: f64 = 0.0;
    for d in 0..dim {
        value[d] = kron[d] * h;
        error[d] = ((kron[d] - gauss[d]) * h).abs();
        magnitude[d] *= h.abs();
        worst = worst.max(error[d]);
    }
    if !worst.is_finite() || value.iter().any(|v| !v.is_finite()) {
        worst = f64::INFINITY;
    }
    Panel { a, b, value, error, magnitude, worst }
}

/// Globally adaptive Gauss-Kronrod integration of a vector-valued integrand
/// over `[a, b]`, starting from `pieces` equal panels.
///
/// Convergence is declared when the summed error of every component is below
/// `max(abs_tol, rel_tol * max_c |I_c|)`, or below the roundoff floor
/// `50 ε max_c ∫|f_c|` for integrals that cancel to near zero.
pub fn integrate_vec<F>(mut f: F, a: f64, b: f64, dim: usize, pieces: usize, spec: &QuadratureSpec) -> Result<Vec<f64>>
where
    F: FnMut(f64, &mut [f64]),
{
    spec.validate()?;
    if a == b || dim == 0 {
        return Ok(vec![0.0; dim]);
    }
    let pieces = pieces.max(1);
    if pieces > spec.max_subdivisions {
        return Err(Error::Convergence { previous: f64::NAN, last: f64::NAN });
    }
    let mut buf = vec![0.0; dim];
    let mut heap = BinaryHeap::with_capacity(2 * pieces);
    let step = (b - a) / pieces as f64;
    for i in 0..pieces {
        let lo = a + step * i as f64;
        let hi = if i + 1 == pieces { b } else { a + step * (i + 1) as f64 };
        heap.push(gk21(&mut f, lo, hi, dim, &mut buf));
    }
    let mut total = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    let mut mag = vec![0.0; dim];
    let resum = |heap: &BinaryHeap<Panel>, total: &mut [f64], err: &mut [f64], mag: &mut [f64]| {
        total.iter_mut().for_each(|v| *v = 0.0);
        err.iter_mut().for_each(|v| *v = 0.0);
        mag.iter_mut().for_each(|v| *v = 0.0);
        for p in heap.iter() {
            for d in 0..total.len() {
                total[d] += p.value[d];
                err[d] += p.error[d];
                mag[d] += p.magnitude[d];
            }
        }
    };
    resum(&heap, &mut total, &mut err, &mut mag);
    let mut previous = total[0];
    let mut count = pieces;
    let mut since_resum = 0usize;
    loop {
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let roundoff = 50.0 * f64::EPSILON * mag.iter().fold(0.0f64, |m, v| m.max(*v));
        let tol = spec.abs_tol.max(spec.rel_tol * scale).max(roundoff);
        let worst_err = err.iter().fold(0.0f64, |m, v| m.max(*v));
        if worst_err <= tol {
            return Ok(total);
        }
        if count >= spec.max_subdivisions {
            return Err(Error::Convergence { previous, last: total[0] });
        }
        let panel = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (panel.a + panel.b);
        if !(mid > panel.a && mid < panel.b) {
            return Err(Error::Convergence { previous, last: total[0] });
        }
        let left = gk21(&mut f, panel.a, mid, dim, &mut buf);
        let right = gk21(&mut f, mid, panel.b, dim, &mut buf);
        previous = total[0];
        for d in 0..dim {
            total[d] += left.value[d] + right.value[d] - panel.value[d];
            err[d] += left.error[d] + right.error[d] - panel.error[d];
            mag[d] += left.magnitude[d] + right.magnitude[d] - panel.magnitude[d];
        }
        heap.push(left);
        heap.push(right);
        count += 1;
        since_resum += 1;
        if since_resum >= 256 || err.iter().any(|e| !e.is_finite() || *e < 0.0) {
            resum(&heap, &mut total, &mut err, &mut mag);
            since_resum = 0;
        }
    }
}

/// Scalar adaptive integration over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, pieces: usize, spec: &QuadratureSpec) -> Result<f64> {
    let v = integrate_vec(|x, out: &mut [f64]| out[0] = f(x), a, b, 1, pieces, spec)?;
    Ok(v[0])
}

/// `∫₀^∞ f(w) dw` for integrands carrying a Gaussian factor of width `decay_scale`.
pub fn gaussian_tail_quad<F: FnMut(f64) -> f64>(f: F, decay_scale: f64, spec: &QuadratureSpec) -> Result<f64> {
    gaussian_tail_quad_osc(f, decay_scale, 0.0, spec)
}

/// As [`gaussian_tail_quad`], with the integrand oscillating at time scale
/// `t_osc` (e.g. `cos(w t)`); the initial partition resolves half-periods.
pub fn gaussian_tail_quad_osc<F: FnMut(f64) -> f64>(f: F, decay_scale: f64, t_osc: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(decay_scale > 0.0) {
        return Err(Error::Domain(format!("decay scale must be positive, got {decay_scale}")));
    }
    let upper = spec.gaussian_cutoff(decay_scale);
    integrate(f, 0.0, upper, oscillation_pieces(upper, t_osc), spec)
}

/// Number of initial panels so that each spans about half an oscillation of `cos(w t)`.
pub fn oscillation_pieces(upper: f64, t_osc: f64) -> usize {
    let n = (upper * t_osc.abs() / std::f64::consts::PI).ceil();
    if n.is_finite() {
        (n as usize).clamp(4, 100_000)
    } else {
        100_000
    }
}

/// Fixed 10-point Gauss-Legendre rule on `[a, b]`; exact for polynomials of degree ≤ 19.
pub fn gauss_legendre_10<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = 0.0;
    for j in 0..5 {
        let dx = h * XGK[2 * j + 1];
        sum += WG[j] * (f(c - dx) + f(c + dx));
    }
    sum * h
}

/// `∫₀^t u^α e^{-iwu} du`.
pub fn osc_poly_integral(alpha: u32, w: f64, t: f64) -> Result<Complex64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("osc_poly_integral needs t >= 0, got {t}")));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); alpha as usize + 1];
    osc_poly_table(w, t, &mut out);
    Ok(out[alpha as usize])
}

/// Fills `out[k] = ∫₀^t u^k e^{-iwu} du` for `k < out.len()`; `t ≥ 0`.
pub fn osc_poly_table(w: f64, t: f64, out: &mut [Complex64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let z = w * t;
    let degree = (n - 1) as f64;
    if z.abs() < TAYLOR_SWITCH.max(degree) {
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = osc_poly_taylor(k as u32, w, t);
        }
        return;
    }
    let phase = Complex64::new(0.0, -z).exp();
    let i_over_w = Complex64::new(0.0, 1.0 / w);
    out[0] = (Complex64::new(1.0, 0.0) - phase) * Complex64::new(0.0, -1.0 / w);
    let mut tk = 1.0;
    for k in 1..n {
        tk *= t;
        out[k] = i_over_w * (phase * tk - out[k - 1] * k as f64);
    }
}

/// Taylor branch of [`osc_poly_integral`]: `Σ_j (-iw)^j t^{α+j+1} / (j! (α+j+1))`.
pub fn osc_poly_taylor(alpha: u32, w: f64, t: f64) -> Complex64 {
    let a1 = alpha as f64 + 1.0;
    let scale = t.powi(alpha as i32 + 1);
    let z = Complex64::new(0.0, -w * t);
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..200u32 {
        if j > 0 {
            power = power * z / j as f64;
        }
        let term = power / (a1 + j as f64);
        sum += term;
        if j > 2 && term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum * scale
}

/// Upward recursion branch of [`osc_poly_integral`] (no Taylor switch); `w ≠ 0`.
pub fn osc_poly_recursion(alpha: u32, w: f64, t: f64) -> Complex64 {
    let phase = Complex64::new(0.0, -w * t).exp();
    let i_over_w = Complex64::new(0.0, 1.0 / w);
    let mut acc = (Complex64::new(1.0, 0.0) - phase) * Complex64::new(0.0, -1.0 / w);
    let mut tk = 1.0;
    for k in 1..=alpha {
        tk *= t;
        acc = i_over_w * (phase * tk - acc * k as f64);
    }
    acc
}

/// Finds `t*` with `g(t*) = target` for increasing `g` with `g(0) < target`.
///
/// The bracket grows geometrically from `bracket_hint`, then Brent's method
/// refines until `|g - target| ≤ tol·|target|`.
pub fn find_root_increasing<F, E>(mut g: F, target: f64, bracket_hint: f64, tol: f64) -> std::result::Result<f64, E>
where
    F: FnMut(f64) -> std::result::Result<f64, E>,
    E: From<Error>,
{
    const MAX_EXPANSIONS: usize = 400;
    if !(bracket_hint > 0.0) || !bracket_hint.is_finite() {
        return Err(Error::Domain(format!("bracket hint must be positive, got {bracket_hint}")).into());
    }
    let accept = tol * target.abs().max(f64::MIN_POSITIVE);
    let g_hint = g(bracket_hint)?;
    if (g_hint - target).abs() <= accept {
        return Ok(bracket_hint);
    }
    let (mut lo, mut glo, mut hi, mut ghi);
    if g_hint < target {
        lo = bracket_hint;
        glo = g_hint;
        hi = 2.0 * lo;
        ghi = g(hi)?;
        let mut n = 1;
        while ghi < target {
            if n >= MAX_EXPANSIONS || !hi.is_finite() {
                return Err(Error::UnboundedRoot { expansions: n, last_value: ghi }.into());
            }
            lo = hi;
            glo = ghi;
            hi *= 2.0;
            ghi = g(hi)?;
            n += 1;
        }
    } else {
        hi = bracket_hint;
        ghi = g_hint;
        lo = 0.5 * hi;
        glo = g(lo)?;
        let mut n = 1;
        while glo >= target {
            if n >= MAX_EXPANSIONS {
                lo = 0.0;
                glo = g(0.0)?;
                break;
            }
            hi = lo;
            ghi = glo;
            lo *= 0.5;
            glo = g(lo)?;
            n += 1;
        }
    }
    brent(&mut g, target, lo, glo - target, hi, ghi - target, accept)
}

fn brent<F, E>(g: &mut F, target: f64, a0: f64, fa0: f64, b0: f64, fb0: f64, accept: f64) -> std::result::Result<f64, E>
where
    F: FnMut(f64) -> std::result::Result<f64, E>,
    E: From<Error>,
{
    let (mut a, mut fa, mut b, mut fb) = (a0, fa0, b0, fb0);
    if fa.abs() <= accept {
        return Ok(a);
    }
    if fb.abs() <= accept {
        return Ok(b);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let xm = 0.5 * (c - b);
        if fb.abs() <= accept {
            return Ok(b);
        }
        if xm.abs() <= tol1 {
            return Err(Error::Iteration(format!(
                "bracket collapsed at t = {b:e} with residual {fb:e} (target {target:e})"
            ))
            .into());
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b)? - target;
    }
    Err(Error::Iteration("Brent iteration limit reached".into()).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn osc_poly_examples() {
        let v = osc_poly_integral(0, 0.0, 1.0).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let v = osc_poly_integral(1, 0.0, 2.0).unwrap();
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let v = osc_poly_integral(0, PI, 1.0).unwrap();
        assert!((v - Complex64::new(0.0, -2.0 / PI)).norm() < 1e-14);
        assert!(osc_poly_integral(1, 1.0, -1.0).is_err());
    }

    #[test]
    fn osc_poly_at_zero_frequency() {
        for alpha in 0..=8u32 {
            for &t in &[0.3, 1.0, 2.5] {
                let v = osc_poly_integral(alpha, 0.0, t).unwrap();
                let exact = t.powi(alpha as i32 + 1) / (alpha as f64 + 1.0);
                assert!((v.re - exact).abs() <= 1e-14 * exact && v.im == 0.0);
            }
        }
    }

    #[test]
    fn branches_agree_near_switch() {
        for alpha in 0..=6u32 {
            let switch = TAYLOR_SWITCH.max(alpha as f64);
            for i in 0..21 {
                let z = switch * (0.8 + 0.02 * i as f64);
                for &t in &[0.7, 1.0, 3.0] {
                    let w = z / t;
                    let a = osc_poly_taylor(alpha, w, t);
                    let b = osc_poly_recursion(alpha, w, t);
                    assert!((a - b).norm() <= 1e-10 * a.norm(), "alpha={alpha} z={z} t={t}");
                }
            }
        }
    }

    #[test]
    fn cancelling_oscillatory_integral_stops_at_roundoff() {
        let spec = QuadratureSpec { rel_tol: 1e-12, abs_tol: 0.0, ..Default::default() };
        let t = 9.0;
        let v = gaussian_tail_quad_osc(|w| (-w * w).exp() * (w * t).cos(), 1.0, t, &spec).unwrap();
        let exact = 0.5 * PI.sqrt() * (-t * t / 4.0).exp();
        assert!((v - exact).abs() < 1e-14, "{v} vs {exact}");
    }

    #[test]
    fn osc_poly_against_quadrature() {
        let spec = QuadratureSpec { rel_tol: 1e-13, abs_tol: 1e-15, ..Default::default() };
        for alpha in 0..=4u32 {
            for &(w, t) in &[(0.1, 1.0), (3.0, 2.0), (-7.0, 1.5), (40.0, 0.9)] {
                let re = integrate(|u| u.powi(alpha as i32) * (w * u).cos(), 0.0, t, 8, &spec).unwrap();
                let im = integrate(|u| -u.powi(alpha as i32) * (w * u).sin(), 0.0, t, 8, &spec).unwrap();
                let v = osc_poly_integral(alpha, w, t).unwrap();
                let err = (v - Complex64::new(re, im)).norm();
                assert!(err <= 1e-11 * v.norm().max(1e-3), "alpha={alpha} w={w}: {err}");
            }
        }
    }

    #[test]
    fn gaussian_tail_examples() {
        let spec = QuadratureSpec::default();
        let v = gaussian_tail_quad(|w| (-w * w).exp(), 1.0, &spec).unwrap();
        assert!((v - PI.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(gaussian_tail_quad(|_| 0.0, 1.0, &spec).unwrap(), 0.0);
        let v = gaussian_tail_quad(|w| w * (-w * w / 25.0).exp(), 5.0, &spec).unwrap();
        assert!((v - 12.5).abs() < 1e-9 * 12.5);
    }

    #[test]
    fn oscillatory_gaussian_tail() {
        let spec = QuadratureSpec::default();
        let t = 200.0;
        let v = gaussian_tail_quad_osc(|w| (-w * w).exp() * (w * t).cos(), 1.0, t, &spec).unwrap();
        let exact = 0.5 * PI.sqrt() * (-t * t / 4.0).exp();
        assert!((v - exact).abs() < 1e-13);
        let t = 3.0;
        let v = gaussian_tail_quad_osc(|w| (-w * w).exp() * (w * t).cos(), 1.0, t, &spec).unwrap();
        let exact = 0.5 * PI.sqrt() * (-t * t / 4.0).exp();
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn convergence_error_reports_estimates() {
        let spec = QuadratureSpec { rel_tol: 1e-15, abs_tol: 0.0, max_subdivisions: 3 };
        match integrate(|x| x.abs().sqrt().recip(), 1e-12, 1.0, 1, &spec) {
            Err(Error::Convergence { .. }) => {}
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn root_examples() {
        let r: f64 = find_root_increasing(|t| Ok::<_, Error>(t * t), 4.0, 0.1, 1e-12).unwrap();
        assert!((r - 2.0).abs() < 1e-11);
        let r: f64 = find_root_increasing(Ok::<_, Error>, 0.5, 40.0, 1e-12).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        let again: f64 = find_root_increasing(|t| Ok::<_, Error>(t * t), 4.0, r.max(2.0), 1e-12).unwrap();
        assert!((again - 2.0).abs() < 1e-11);
    }

    #[test]
    fn unbounded_root() {
        let r = find_root_increasing(|t: f64| Ok::<_, Error>(1.0 - (-t).exp()), 2.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::UnboundedRoot { .. })));
    }
}
