//! Flat `section.key = value` configuration files.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use decometer::bath::SpectralBath;
use decometer::decoherence::{MeasurementSetup, ObjectSpec, PointerSpec, Variant};

use crate::Failure;

const KNOWN_KEYS: &[&str] = &[
    "bath.m",
    "bath.gamma_hat",
    "bath.w_d",
    "bath.beta",
    "bath.eta",
    "setup.alpha",
    "setup.epsilon",
    "setup.tau_ent",
    "setup.variant",
    "object.eigenvalues",
    "object.amplitudes",
    "object.rho",
    "object.energies",
    "pointer.delta",
    "pointer.lambda",
    "pointer.mass",
    "pointer.v2",
    "pointer.delta_class",
    "pair.s",
    "pair.s_prime",
    "sweep.var",
    "sweep.scale",
    "sweep.start",
    "sweep.stop",
    "sweep.count",
    "tdec.cases",
    "tdec.w_d",
    "tdec.eta",
    "tdec.tau_ent",
    "tdec.zero_temperature",
    "evolve.times",
    "evolve.time_unit",
    "grid.points",
    "grid.min",
    "grid.max",
    "wigner.t",
    "wigner.time_unit",
    "wigner.p_points",
    "wigner.p_max",
    "wick.freqs",
    "wick.couplings",
    "wick.beta",
    "wick.cutoff",
    "wick.times",
    "validate.preset",
];

const SWEEP_VARS: &[&str] = &["tau_ent", "eta", "w_d", "alpha", "m", "t"];

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

fn bad(key: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::config(format!("{key}: {msg}"))
}

pub fn parse_complex(text: &str) -> Option<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    if let Some(body) = s.strip_suffix('i') {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(k, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[k - 1], b'e' | b'E'))
            .map(|(k, _)| k)
            .last();
        return match split {
            Some(k) => {
                let re = body[..k].parse().ok()?;
                let im = match &body[k..] {
                    "+" => 1.0,
                    "-" => -1.0,
                    v => v.parse().ok()?,
                };
                Some(Complex64::new(re, im))
            }
            None => {
                let im = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    v => v.parse().ok()?,
                };
                Some(Complex64::new(0.0, im))
            }
        };
    }
    s.parse().ok().map(|re| Complex64::new(re, 0.0))
}

fn parse_f64(key: &str, v: &str) -> Result<f64, Failure> {
    match v.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| bad(key, format!("expected a number, got '{v}'"))),
    }
}

/// Sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub var: String,
    pub log: bool,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                if k == n - 1 {
                    return self.stop;
                }
                if self.log {
                    (self.start.ln() + f * (self.stop / self.start).ln()).exp()
                } else {
                    self.start + f * (self.stop - self.start)
                }
            })
            .collect()
    }
}

/// `(α, m, w_D)` case of a decoherence-time sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdecCase {
    pub alpha: u32,
    pub m: u32,
    pub w_d: f64,
}

impl TdecCase {
    pub fn label(&self) -> String {
        format!("a{}_m{}_wd{}", self.alpha, self.m, self.w_d)
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let known: BTreeSet<&str> = KNOWN_KEYS.iter().copied().collect();
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Failure::config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let key = k.trim().to_ascii_lowercase();
            if !known.contains(key.as_str()) {
                return Err(Failure::config(format!("line {}: unknown key '{key}'", lineno + 1)));
            }
            let value = v.trim().trim_matches('"').to_string();
            if values.insert(key.clone(), value).is_some() {
                return Err(Failure::config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &String)> {
        self.values.iter()
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, Failure> {
        self.values.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, Failure> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, Failure> {
        self.f64(key)?.ok_or_else(|| bad(key, "required"))
    }

    pub fn uint(&self, key: &str) -> Result<Option<u64>, Failure> {
        self.values
            .get(key)
            .map(|v| v.trim().parse::<u64>().map_err(|_| bad(key, format!("expected a non-negative integer, got '{v}'"))))
            .transpose()
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, Failure> {
        match self.values.get(key).map(|v| v.trim().to_ascii_lowercase()) {
            None => Ok(default),
            Some(v) if v == "true" || v == "1" || v == "yes" => Ok(true),
            Some(v) if v == "false" || v == "0" || v == "no" => Ok(false),
            Some(v) => Err(bad(key, format!("expected true or false, got '{v}'"))),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, Failure> {
        self.values
            .get(key)
            .map(|v| v.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_f64(key, t)).collect())
            .transpose()
    }

    pub fn complex_list(&self, key: &str) -> Result<Option<Vec<Complex64>>, Failure> {
        self.values
            .get(key)
            .map(|v| {
                v.split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| parse_complex(t).ok_or_else(|| bad(key, format!("cannot parse complex number '{}'", t.trim()))))
                    .collect()
            })
            .transpose()
    }

    pub fn sweep(&self, allowed: &[&str], default_var: &str) -> Result<Sweep, Failure> {
        let var = self.str("sweep.var").unwrap_or(default_var).to_ascii_lowercase();
        if !SWEEP_VARS.contains(&var.as_str()) {
            return Err(bad("sweep.var", format!("unrecognized variable '{var}' (expected one of {})", SWEEP_VARS.join(", "))));
        }
        if !allowed.contains(&var.as_str()) {
            return Err(bad("sweep.var", format!("'{var}' is not supported here (expected one of {})", allowed.join(", "))));
        }
        let log = match self.str("sweep.scale").unwrap_or("linear") {
            "log" => true,
            "linear" => false,
            other => return Err(bad("sweep.scale", format!("expected log or linear, got '{other}'"))),
        };
        let start = self.require_f64("sweep.start")?;
        let stop = self.require_f64("sweep.stop")?;
        let count = self.uint("sweep.count")?.ok_or_else(|| bad("sweep.count", "required"))? as usize;
        if count < 2 {
            return Err(bad("sweep.count", "sweep needs at least 2 points"));
        }
        if !(start < stop) || !start.is_finite() || !stop.is_finite() {
            return Err(bad("sweep.start", "sweep needs finite start < stop"));
        }
        if log && start <= 0.0 {
            return Err(bad("sweep.start", "log sweep needs start > 0"));
        }
        Ok(Sweep { var, log, start, stop, count })
    }

    pub fn tdec_cases(&self) -> Result<Vec<TdecCase>, Failure> {
        let default_wd = self.f64_or("tdec.w_d", 5.0)?;
        let text = self.str("tdec.cases").ok_or_else(|| bad("tdec.cases", "required"))?;
        let mut out = Vec::new();
        for item in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let parts: Vec<&str> = item.split(':').map(str::trim).collect();
            if parts.len() < 2 || parts.len() > 3 {
                return Err(bad("tdec.cases", format!("expected alpha:m[:w_d], got '{item}'")));
            }
            let alpha = parts[0].parse().map_err(|_| bad("tdec.cases", format!("bad alpha in '{item}'")))?;
            let m = parts[1].parse().map_err(|_| bad("tdec.cases", format!("bad m in '{item}'")))?;
            let w_d = match parts.get(2) {
                Some(v) => parse_f64("tdec.cases", v)?,
                None => default_wd,
            };
            out.push(TdecCase { alpha, m, w_d });
        }
        if out.is_empty() {
            return Err(bad("tdec.cases", "no cases given"));
        }
        Ok(out)
    }

    pub fn bath(&self) -> Result<SpectralBath, Failure> {
        let m = self.uint("bath.m")?.unwrap_or(1);
        if m % 2 == 0 {
            return Err(bad("bath.m", "m must be odd"));
        }
        let gamma_hat = self.f64_or("bath.gamma_hat", 1.0)?;
        let w_d = self.f64_or("bath.w_d", 5.0)?;
        let beta = self.f64_or("bath.beta", 1.0)?;
        SpectralBath::new(m as u32, gamma_hat, w_d, beta).map_err(|e| Failure::from(e).context("bath"))
    }

    fn object(&self) -> Result<ObjectSpec, Failure> {
        let eigenvalues = self.f64_list("object.eigenvalues")?.unwrap_or_else(|| vec![-0.5, 0.5]);
        let n = eigenvalues.len();
        let energies = self.f64_list("object.energies")?;
        let rho = match (self.complex_list("object.rho")?, self.complex_list("object.amplitudes")?) {
            (Some(_), Some(_)) => return Err(bad("object.rho", "give either object.rho or object.amplitudes, not both")),
            (Some(r), None) => {
                if r.len() != n * n {
                    return Err(bad("object.rho", format!("expected {} row-major entries", n * n)));
                }
                DMatrix::from_row_slice(n, n, &r)
            }
            (None, amps) => {
                let a = amps.unwrap_or_else(|| vec![Complex64::new(1.0, 0.0); n]);
                if a.len() != n {
                    return Err(bad("object.amplitudes", format!("expected {n} amplitudes")));
                }
                let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum();
                if norm == 0.0 {
                    return Err(bad("object.amplitudes", "amplitudes must not all vanish"));
                }
                DMatrix::from_fn(n, n, |i, j| a[i] * a[j].conj() / norm)
            }
        };
        ObjectSpec::new(eigenvalues, rho, energies).map_err(|e| Failure::from(e).context("object"))
    }

    fn pointer(&self) -> Result<PointerSpec, Failure> {
        let delta = self.f64_or("pointer.delta", 1.0)?;
        let lambda = self.f64_or("pointer.lambda", 4.0 * PI * delta)?;
        let mass = self.f64_or("pointer.mass", 1.0)?;
        let v2 = self.f64_or("pointer.v2", 1.0)?;
        let delta_class = self.f64("pointer.delta_class")?;
        PointerSpec::new(delta, lambda, mass, v2, delta_class).map_err(|e| Failure::from(e).context("pointer"))
    }

    pub fn variant(&self) -> Result<Variant, Failure> {
        match self.str("setup.variant").unwrap_or("partial") {
            "partial" | "partial_equilibrium" => Ok(Variant::PartialEquilibrium),
            "equilibrium" | "equilibrium_apparatus" => Ok(Variant::EquilibriumApparatus),
            other => Err(bad("setup.variant", format!("expected partial or equilibrium, got '{other}'"))),
        }
    }

    /// Full measurement setup; `bath.eta` rescales `γ̂` and `setup.tau_ent`
    /// fixes `ε` through `t_ent` in the natural time unit.
    pub fn setup(&self) -> Result<MeasurementSetup, Failure> {
        let alpha = self.uint("setup.alpha")?.unwrap_or(1) as u32;
        let object = self.object()?;
        let pointer = self.pointer()?;
        let variant = self.variant()?;
        let mut bath = self.bath()?;
        let mut epsilon = self.f64_or("setup.epsilon", 1.0)?;
        let build = |bath: &SpectralBath, epsilon: f64| {
            MeasurementSetup::new(epsilon, alpha, object.clone(), pointer.clone(), bath.clone(), variant)
                .map_err(|e| Failure::from(e).context("setup"))
        };
        let mut setup = build(&bath, epsilon)?;
        if let Some(eta) = self.f64("bath.eta")? {
            if !(eta > 0.0) {
                return Err(bad("bath.eta", "must be positive"));
            }
            let current = setup.eta();
            bath = bath.scaled((eta / current).powi(2)).map_err(Failure::from)?;
            setup = build(&bath, epsilon)?;
        }
        if let Some(tau) = self.f64("setup.tau_ent")? {
            if !(tau > 0.0) {
                return Err(bad("setup.tau_ent", "must be positive"));
            }
            let ds = setup.object.delta_s().map_err(Failure::from)?;
            epsilon = setup.pointer.delta / (tau * setup.time_unit() * ds);
            setup = build(&bath, epsilon)?;
        }
        Ok(setup)
    }

    /// `(s, s')` from `pair.*`, defaulting to the first coherent pair.
    pub fn pair(&self, setup: &MeasurementSetup) -> Result<(f64, f64), Failure> {
        match (self.f64("pair.s")?, self.f64("pair.s_prime")?) {
            (Some(s), Some(sp)) => Ok((s, sp)),
            (None, None) => {
                let ev = setup.object.eigenvalues();
                let (i, j) = *setup
                    .object
                    .coupled_pairs()
                    .first()
                    .ok_or_else(|| Failure::config("object has no coherent pair; set pair.s and pair.s_prime"))?;
                Ok((ev[i], ev[j]))
            }
            _ => Err(bad("pair.s", "give both pair.s and pair.s_prime")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.8+0.3i"), Some(Complex64::new(0.8, 0.3)));
        assert_eq!(parse_complex(" 0.5 - 0.4i"), Some(Complex64::new(0.5, -0.4)));
        assert_eq!(parse_complex("-2i"), Some(Complex64::new(0.0, -2.0)));
        assert_eq!(parse_complex("1e-3+2e-1i"), Some(Complex64::new(1e-3, 0.2)));
        assert_eq!(parse_complex("3"), Some(Complex64::new(3.0, 0.0)));
        assert_eq!(parse_complex("i"), Some(Complex64::new(0.0, 1.0)));
        assert_eq!(parse_complex("x"), None);
    }

    #[test]
    fn parse_and_reject() {
        let c = Config::parse("bath.m = 3 # odd\n\nbath.beta = inf\n").unwrap();
        assert_eq!(c.uint("bath.m").unwrap(), Some(3));
        assert!(c.f64("bath.beta").unwrap().unwrap().is_infinite());
        assert!(Config::parse("bath.q = 1").unwrap_err().message.contains("bath.q"));
        assert!(Config::parse("bath.m = 1\nbath.m = 3").is_err());
        let even = Config::parse("bath.m = 2").unwrap();
        assert!(even.bath().unwrap_err().message.contains("m must be odd"));
    }

    #[test]
    fn sweep_points() {
        let c = Config::parse("sweep.var = t\nsweep.scale = log\nsweep.start = 0.01\nsweep.stop = 1\nsweep.count = 3").unwrap();
        let s = c.sweep(&["t"], "t").unwrap();
        let p = s.points();
        assert!((p[1] - 0.1).abs() < 1e-15 && p[2] == 1.0);
        let c = Config::parse("sweep.var = eta\nsweep.start = 0\nsweep.stop = 1\nsweep.count = 1").unwrap();
        assert!(c.sweep(&["eta"], "eta").is_err());
    }

    #[test]
    fn eta_and_tau_ent_rescaling() {
        let c = Config::parse("bath.eta = 0.1\nsetup.tau_ent = 0.01\nobject.eigenvalues = 0, 1").unwrap();
        let s = c.setup().unwrap();
        assert!((s.eta() - 0.1).abs() < 1e-12);
        assert!((s.t_ent_global().unwrap() - 0.01).abs() < 1e-15);
    }
}
