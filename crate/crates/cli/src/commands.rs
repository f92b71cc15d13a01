//! Subcommand implementations.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use decometer::decoherence::{sweep_point, MeasurementSetup, SweepPoint};
use decometer::dynamics::{self, GridState, DEFAULT_GRID_POINTS};
use decometer::wick_oracle::{oracle_suite, FiniteBosonBath};

use crate::config::{Config, Sweep};
use crate::output::{Cell, Plot, Series, Sink, Stroke, Table};
use crate::Failure;

/// Successful run: exit code, warnings for stderr and report lines for stdout.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: u8,
    pub warnings: Vec<String>,
    pub report: Vec<String>,
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn sweep_keys_present(config: &Config) -> bool {
    ["sweep.var", "sweep.scale", "sweep.start", "sweep.stop", "sweep.count"].iter().any(|k| config.has(k))
}

/// Sweep from `sweep.*` or, if no sweep key is set, the given default.
fn sweep_or(config: &Config, allowed: &[&str], default: Sweep) -> Result<Sweep, Failure> {
    if sweep_keys_present(config) {
        config.sweep(allowed, &default.var)
    } else {
        Ok(default)
    }
}

pub fn bath_table(config: &Config, sink: &mut Sink) -> Result<Outcome, Failure> {
    let bath = config.bath()?;
    let sweep = sweep_or(config, &["t"], Sweep { var: "t".into(), log: false, start: 0.0, stop: 10.0, count: 201 })?;
    let ts = sweep.points();
    let rows: Vec<Vec<Cell>> = ts
        .par_iter()
        .map(|&t| {
            let s = bath.sample(t)?;
            Ok(vec![t.into(), s.re_h.into(), s.im_h.into(), bath.gamma_t_closed(t).into()])
        })
        .collect::<Result<_, decometer::Error>>()?;
    let mut table = Table::new(columns(&["t", "re_h", "im_h", "gamma_t"]));
    table.rows = rows;
    table.meta("gamma0", format!("{:.16e}", bath.gamma0()));
    table.meta("b_variance", format!("{:.16e}", bath.b_variance()));
    table.meta("t_B", format!("{:.16e}", bath.t_b()));
    table.meta("T_B", format!("{:.16e}", bath.thermal_time()));
    sink.table("bath", &table)?;
    let series = |name: &str, k: usize, color: usize| Series {
        label: name.into(),
        points: table.rows.iter().map(|r| (num(&r[0]), num(&r[k]))).collect(),
        stroke: Stroke::Solid,
        color,
    };
    let plot = Plot {
        title: "bath correlator".into(),
        x_label: "t".into(),
        y_label: "value".into(),
        log_x: false,
        log_y: false,
        series: vec![series("Re h", 1, 0), series("Im h", 2, 1), series("gamma", 3, 2)],
    };
    sink.plot("bath", &plot)?;
    Ok(Outcome { report: written(sink), ..Default::default() })
}

fn num(c: &Cell) -> f64 {
    match c {
        Cell::Num(v) => *v,
        Cell::Int(v) => *v as f64,
        Cell::Text(_) => f64::NAN,
    }
}

fn written(sink: &Sink) -> Vec<String> {
    sink.written.iter().map(|p| format!("wrote {}", p.display())).collect()
}

pub fn dpeak(config: &Config, sink: &mut Sink) -> Result<Outcome, Failure> {
    let setup = config.setup()?;
    let (s, sp) = config.pair(&setup)?;
    if s == sp || setup.is_decoherence_free(s, sp) {
        return Err(decometer::Error::DecoherenceFree { s, s_prime: sp }.into());
    }
    let unit = setup.time_unit();
    let sweep = sweep_or(config, &["t"], Sweep { var: "t".into(), log: false, start: 0.0, stop: 3.0, count: 61 })?;
    let rows: Vec<Vec<Cell>> = sweep
        .points()
        .par_iter()
        .map(|&tau| {
            let t = tau * unit;
            Ok(vec![tau.into(), t.into(), setup.d_peak(s, sp, t)?.into()])
        })
        .collect::<Result<_, decometer::Error>>()?;
    let mut table = Table::new(columns(&["tau", "t", "d_peak"]));
    table.rows = rows;
    table.meta("s", s);
    table.meta("s_prime", sp);
    table.meta("time_unit", format!("{unit:.16e}"));
    table.meta("eta", format!("{:.16e}", setup.eta()));
    sink.table("dpeak", &table)?;
    let plot = Plot {
        title: format!("peak decoherence exponent, s = {s}, s' = {sp}"),
        x_label: "tau".into(),
        y_label: "D_peak".into(),
        log_x: sweep.log,
        log_y: false,
        series: vec![Series {
            label: "D_peak".into(),
            points: table.rows.iter().map(|r| (num(&r[0]), num(&r[2]))).collect(),
            stroke: Stroke::Solid,
            color: 0,
        }],
    };
    sink.plot("dpeak", &plot)?;
    Ok(Outcome { report: written(sink), ..Default::default() })
}

pub fn tdec_sweep(config: &Config, sink: &mut Sink) -> Result<Outcome, Failure> {
    let cases = config.tdec_cases()?;
    let sweep = config.sweep(&["tau_ent", "eta"], "tau_ent")?;
    let eta_fixed = config.f64_or("tdec.eta", 0.1)?;
    let tau_fixed = config.f64_or("tdec.tau_ent", 0.1)?;
    let zero_t = config.bool_or("tdec.zero_temperature", false)?;
    if !(eta_fixed > 0.0) || !(tau_fixed > 0.0) {
        return Err(Failure::config("tdec.eta and tdec.tau_ent must be positive"));
    }
    for c in &cases {
        if c.m % 2 == 0 {
            return Err(Failure::config(format!("tdec.cases: m must be odd (case {})", c.label())));
        }
        if c.alpha == 0 || c.alpha > decometer::decoherence::MAX_ALPHA {
            return Err(Failure::config(format!("tdec.cases: alpha out of range (case {})", c.label())));
        }
    }
    let xs = sweep.points();
    let jobs: Vec<(usize, usize)> = (0..xs.len()).flat_map(|i| (0..cases.len()).map(move |c| (i, c))).collect();
    let results: Vec<Result<SweepPoint, decometer::Error>> = jobs
        .par_iter()
        .map(|&(i, c)| {
            let (eta, tau) = if sweep.var == "eta" { (xs[i], tau_fixed) } else { (eta_fixed, xs[i]) };
            let case = cases[c];
            sweep_point(case.alpha, case.m, eta, tau, case.w_d, zero_t)
        })
        .collect();

    let mut cols = vec![sweep.var.clone()];
    for c in &cases {
        let l = c.label();
        for suffix in ["tau_dec", "tau_int", "tau_markov", "int_valid", "markov_valid"] {
            cols.push(format!("{l}_{suffix}"));
        }
    }
    let mut table = Table::new(cols);
    table.meta("time_unit", if zero_t { "1/omega_D" } else { "hbar*beta" });
    table.meta("zero_temperature", zero_t);
    table.meta(if sweep.var == "eta" { "tau_ent" } else { "eta" }, if sweep.var == "eta" { tau_fixed } else { eta_fixed });
    let mut outcome = Outcome::default();
    let mut failures = 0usize;
    for (i, &x) in xs.iter().enumerate() {
        let mut row = vec![Cell::Num(x)];
        for (c, case) in cases.iter().enumerate() {
            match &results[i * cases.len() + c] {
                Ok(p) => {
                    row.extend([
                        p.tau_dec.into(),
                        p.tau_interaction.into(),
                        p.tau_markov.into(),
                        p.interaction_valid.into(),
                        p.markov_valid.into(),
                    ]);
                    if p.tau_markov.is_nan() {
                        outcome.warnings.push(format!("{} at {}={x}: Markov asymptote did not converge", case.label(), sweep.var));
                    }
                }
                Err(e) => {
                    failures += 1;
                    outcome.warnings.push(format!("{} at {}={x}: {e}", case.label(), sweep.var));
                    row.extend([f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), false.into(), false.into()]);
                }
            }
        }
        table.rows.push(row);
    }
    if failures == results.len() {
        return Err(Failure::new(4, "every sweep point failed to converge"));
    }
    sink.table("tdec", &table)?;

    let mut series = Vec::new();
    for (c, case) in cases.iter().enumerate() {
        let base = 1 + 5 * c;
        for (k, stroke, name) in [(0, Stroke::Solid, "exact"), (1, Stroke::Dashed, "interaction"), (2, Stroke::Dotted, "markov")] {
            let points = table
                .rows
                .iter()
                .map(|r| (num(&r[0]), num(&r[base + k])))
                .filter(|(x, y)| x.is_finite() && y.is_finite() && *x > 0.0 && *y > 0.0)
                .collect();
            series.push(Series { label: format!("{} {name}", case.label()), points, stroke, color: c });
        }
    }
    let plot = Plot {
        title: "decoherence time".into(),
        x_label: sweep.var.clone(),
        y_label: "tau_dec".into(),
        log_x: sweep.log,
        log_y: true,
        series,
    };
    sink.plot("tdec", &plot)?;
    outcome.report = written(sink);
    Ok(outcome)
}

/// Scale of `evolve.time_unit`/`wigner.time_unit`: `t_ent` (default), `t_dec` or `natural`.
fn time_scale(config: &Config, key: &str, setup: &MeasurementSetup) -> Result<f64, Failure> {
    match config.str(key).unwrap_or("t_ent") {
        "t_ent" => Ok(setup.t_ent_global()?),
        "t_dec" => Ok(setup.measurement_t_dec()?.t_dec),
        "natural" => Ok(1.0),
        other => Err(Failure::config(format!("{key}: expected t_ent, t_dec or natural, got '{other}'"))),
    }
}

fn x_grid(config: &Config, setup: &MeasurementSetup, t: f64) -> Result<Vec<f64>, Failure> {
    let n = config.uint("grid.points")?.map_or(DEFAULT_GRID_POINTS, |n| n as usize);
    if n < 3 {
        return Err(Failure::config("grid.points: need at least 3 points"));
    }
    match (config.f64("grid.min")?, config.f64("grid.max")?) {
        (None, None) => Ok(dynamics::default_grid(setup, t, n)),
        (Some(lo), Some(hi)) if lo < hi => Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()),
        (Some(_), Some(_)) => Err(Failure::config("grid.min must be below grid.max")),
        _ => Err(Failure::config("grid.min: give both grid.min and grid.max")),
    }
}

/// Peak location by a parabola through the log of the three samples around the maximum.
fn peak_position(xs: &[f64], ys: &[f64]) -> f64 {
    let k = ys.iter().enumerate().fold(0, |b, (i, y)| if *y > ys[b] { i } else { b });
    if k == 0 || k + 1 == ys.len() || ys[k - 1] <= 0.0 || ys[k + 1] <= 0.0 {
        return xs[k];
    }
    let (a, b, c) = (ys[k - 1].ln(), ys[k].ln(), ys[k + 1].ln());
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return xs[k];
    }
    let h = 0.5 * (xs[k + 1] - xs[k - 1]);
    xs[k] + 0.5 * h * (a - c) / denom
}

struct PeakSummary {
    low: f64,
    high: f64,
}

fn peaks(state: &GridState, setup: &MeasurementSetup) -> Option<PeakSummary> {
    let ev = setup.object.eigenvalues();
    let populated: Vec<usize> = (0..ev.len()).filter(|&i| state.elements.contains_key(&(i, i))).collect();
    let lo = *populated.iter().min_by(|a, b| ev[**a].total_cmp(&ev[**b]))?;
    let hi = *populated.iter().max_by(|a, b| ev[**a].total_cmp(&ev[**b]))?;
    let at = |i: usize| peak_position(&state.x_grid, &state.diagonal_density(i).unwrap_or_default());
    Some(PeakSummary { low: at(lo), high: at(hi) })
}

pub fn evolve(config: &Config, sink: &mut Sink) -> Result<Outcome, Failure> {
    let setup = config.setup()?;
    let scale = time_scale(config, "evolve.time_unit", &setup)?;
    let taus = config.f64_list("evolve.times")?.unwrap_or_else(|| vec![0.0, 1.0]);
    if taus.is_empty() || taus.iter().any(|t| !(*t >= 0.0)) {
        return Err(Failure::config("evolve.times: need non-negative times"));
    }
    let ev = setup.object.eigenvalues().to_vec();
    let s_min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let s_max = ev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut summary = Table::new(columns(&[
        "tau",
        "t",
        "peak_low",
        "peak_high",
        "separation",
        "expected_separation",
        "max_coherence",
        "coherence_ratio",
        "trace",
    ]));
    summary.meta("time_scale", format!("{scale:.16e}"));
    let mut outcome = Outcome::default();
    for (n, &tau) in taus.iter().enumerate() {
        let t = tau * scale;
        let grid = x_grid(config, &setup, t)?;
        let state = dynamics::evolve(&setup, t, &grid)?;
        let reference = dynamics::evolve(&setup, 0.0, &grid)?.max_coherence();
        let mut table = Table::new(columns(&["x", "x_prime", "i", "j", "re", "im"]));
        table.meta("tau", tau);
        table.meta("t", format!("{t:.16e}"));
        for (&(i, j), m) in &state.elements {
            for (a, &x) in grid.iter().enumerate() {
                for (b, &xp) in grid.iter().enumerate() {
                    let z = m[(a, b)];
                    table.rows.push(vec![x.into(), xp.into(), Cell::Int(i as i64), Cell::Int(j as i64), z.re.into(), z.im.into()]);
                }
            }
        }
        sink.table(&format!("evolve_{n:03}"), &table)?;
        let (low, high) = peaks(&state, &setup).map_or((f64::NAN, f64::NAN), |p| (p.low, p.high));
        let coherence = state.max_coherence();
        let ratio = if reference > 0.0 { coherence / reference } else { f64::NAN };
        summary.rows.push(vec![
            tau.into(),
            t.into(),
            low.into(),
            high.into(),
            (high - low).into(),
            (setup.epsilon * t * (s_max - s_min)).into(),
            coherence.into(),
            ratio.into(),
            state.trace().into(),
        ]);
        if state.x_grid.first().is_some_and(|&x0| x0 > setup.epsilon * t * s_min - 3.0 * setup.pointer.delta)
            || state.x_grid.last().is_some_and(|&x1| x1 < setup.epsilon * t * s_max + 3.0 * setup.pointer.delta)
        {
            outcome.warnings.push(format!("grid at tau = {tau} clips a pointer peak"));
        }
    }
    sink.table("evolve_summary", &summary)?;
    outcome.report = written(sink);
    Ok(outcome)
}

pub fn wigner(config: &Config, sink: &mut Sink) -> Result<Outcome, Failure> {
    let setup = config.setup()?;
    let scale = time_scale(config, "wigner.time_unit", &setup)?;
    let tau = config.f64_or("wigner.t", 1.0)?;
    if !(tau >= 0.0) {
        return Err(Failure::config("wigner.t must be non-negative"));
    }
    let t = tau * scale;
    let delta = setup.pointer.delta;
    let dp = 2.0 * std::f64::consts::PI / setup.pointer.lambda;
    let xs = if config.has("grid.points") || config.has("grid.min") {
        x_grid(config, &setup, t)?
    } else {
        let ev = setup.object.eigenvalues();
        let shift = setup.epsilon * t;
        let lo = ev.iter().fold(0.0f64, |m, s| m.min(shift * s)) - 6.0 * delta;
        let hi = ev.iter().fold(0.0f64, |m, s| m.max(shift * s)) + 6.0 * delta;
        (0..161).map(|k| lo + (hi - lo) * k as f64 / 160.0).collect()
    };
    let (p_lo, p_hi) = match config.f64("wigner.p_max")? {
        Some(p) if p > 0.0 => (-p, p),
        Some(_) => return Err(Failure::config("wigner.p_max must be positive")),
        None => dynamics::momentum_window(&setup, t, 7.0)?,
    };
    let np = match config.uint("wigner.p_points")? {
        Some(n) if n >= 3 => n as usize,
        Some(_) => return Err(Failure::config("wigner.p_points must be at least 3")),
        None => (((p_hi - p_lo) / (0.25 * dp)).ceil() as usize + 1).max(161),
    };
    let ps: Vec<f64> = (0..np).map(|k| p_lo + (p_hi - p_lo) * k as f64 / (np - 1) as f64).collect();
    let w = dynamics::wigner(&setup, t, &xs, &ps)?;
    let norm = w.normalized();
    let mut table = Table::new(columns(&["x", "p", "x_over_half_delta", "p_over_delta_p", "w"]));
    let integral = w.integral();
    table.meta("t", format!("{t:.16e}"));
    table.meta("integral", format!("{integral:.16e}"));
    table.meta("max", format!("{:.16e}", w.max()));
    table.meta("delta_p", format!("{dp:.16e}"));
    for (a, &x) in xs.iter().enumerate() {
        for (b, &p) in ps.iter().enumerate() {
            table.rows.push(vec![x.into(), p.into(), (x / (0.5 * delta)).into(), (p / dp).into(), norm[(a, b)].into()]);
        }
    }
    sink.table("wigner", &table)?;
    let marginal = w.position_marginal();
    let plot = Plot {
        title: format!("position marginal of the Wigner function, t = {t:.4e}"),
        x_label: "x/(delta/2)".into(),
        y_label: "integral of W over p".into(),
        log_x: false,
        log_y: false,
        series: vec![Series {
            label: "marginal".into(),
            points: xs.iter().zip(&marginal).map(|(x, m)| (x / (0.5 * delta), *m)).collect(),
            stroke: Stroke::Solid,
            color: 0,
        }],
    };
    sink.plot("wigner", &plot)?;
    let mut outcome = Outcome { report: written(sink), ..Default::default() };
    outcome.report.push(format!("integral of W = {integral:.10}"));
    if (integral - 1.0).abs() > 1e-5 {
        outcome.warnings.push(format!("Wigner integral {integral:.8} differs from 1 by more than 1e-5; widen the grids"));
    }
    Ok(outcome)
}

pub fn wick_check(config: &Config, sink: &mut Sink, seed: u64) -> Result<Outcome, Failure> {
    let default = FiniteBosonBath::default_oracle();
    let freqs = config.f64_list("wick.freqs")?.unwrap_or_else(|| default.freqs().to_vec());
    let couplings = config.complex_list("wick.couplings")?.unwrap_or_else(|| default.couplings().to_vec());
    let beta = config.f64_or("wick.beta", default.beta())?;
    let cutoff = config.uint("wick.cutoff")?.map_or(default.fock_cutoff(), |c| c as usize);
    let fb = FiniteBosonBath::new(freqs, couplings, beta, cutoff).map_err(|e| Failure::from(e).context("wick"))?;
    fb.dimension()?;
    let times = match config.f64_list("wick.times")? {
        Some(ts) if !ts.is_empty() => ts,
        Some(_) => return Err(Failure::config("wick.times: need at least one time")),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect()
        }
    };
    let cases = oracle_suite(&fb, &times)?;
    let mut table = Table::new(columns(&["case", "error", "tolerance", "pass"]));
    table.meta("dimension", fb.dimension()?);
    table.meta("times", times.iter().map(|t| format!("{t:.16e}")).collect::<Vec<_>>().join(" "));
    let mut outcome = Outcome::default();
    for c in &cases {
        table.rows.push(vec![Cell::Text(c.name.clone()), c.error.into(), c.tolerance.into(), c.passed().into()]);
        outcome
            .report
            .push(format!("{:<28} {:>12.3e} {:>10.1e} {}", c.name, c.error, c.tolerance, if c.passed() { "PASS" } else { "FAIL" }));
    }
    sink.table("wick", &table)?;
    outcome.report.extend(written(sink));
    if cases.iter().any(|c| !c.passed()) {
        outcome.code = 1;
        outcome.warnings.push("one or more oracle cases failed".into());
    }
    Ok(outcome)
}

// SI constants for the laboratory-scale illustration.
const HBAR: f64 = 1.054_571_817e-34;
const K_B: f64 = 1.380_649e-23;

fn lab_report() -> Vec<String> {
    let t_p = 1.0;
    let mass = 1e-3;
    let delta_class = 1e-2;
    let temperature = 1.0;
    let kt = K_B * temperature;
    let lambda_th = 2.0 * std::f64::consts::PI * HBAR / (mass * kt).sqrt();
    let delta_th = (kt / mass).sqrt() * t_p;
    let thermal_time = HBAR / kt;
    let span = (delta_class / lambda_th).log10();
    let mut out = vec![
        "laboratory preset: T_P = 1 s, M = 1 g, delta_class = 1 cm, T = 1 K".to_string(),
        format!("thermal time hbar/(k_B T)  = {thermal_time:.4e} s"),
        format!("lambda_th                  = {lambda_th:.4e} m"),
        format!("delta_th                   = {delta_th:.4e} m"),
        format!("delta_class                = {delta_class:.4e} m"),
        format!("log10(delta_th/lambda_th)   = {:.2}", (delta_th / lambda_th).log10()),
        format!("log10(delta_class/delta_th) = {:.2}", (delta_class / delta_th).log10()),
        format!("log10(delta_class/lambda_th) = {span:.2}"),
    ];
    let ordered = lambda_th < delta_th && delta_th < delta_class;
    out.push(format!(
        "hierarchy lambda_th << delta_th << delta_class: {}",
        if ordered { "holds" } else { "violated" }
    ));
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6e}"))
}

pub fn validate(config: &Config, sink: &mut Sink) -> Result<Outcome, Failure> {
    let mut outcome = Outcome::default();
    let mut lines = Vec::new();
    match config.str("validate.preset") {
        Some("lab") => lines = lab_report(),
        Some(other) => return Err(Failure::config(format!("validate.preset: unknown preset '{other}' (expected lab)"))),
        None => {
            let setup = config.setup()?;
            let d = setup.validate_setup()?;
            lines.push(format!("variant                   = {:?}", setup.variant));
            lines.push(format!("alpha                     = {}", setup.alpha));
            lines.push(format!("lambda/delta              = {:.6e}", d.lambda_over_delta));
            lines.push(format!("minimum uncertainty       = {}", d.minimum_uncertainty));
            lines.push(format!("squeezing ratio           = {:.6e}", d.squeezing_ratio));
            lines.push(format!("beta/T_P                  = {}", opt(d.beta_over_t_p)));
            lines.push(format!("eta                       = {:.6e}", d.eta));
            lines.push(format!("eta_th                    = {}", opt(d.eta_th)));
            lines.push(format!("gamma0                    = {:.6e}", d.gamma0));
            lines.push(format!("delta_eff                 = {}", opt(d.delta_eff)));
            lines.push(format!("w_eff                     = {}", opt(d.w_eff)));
            lines.push(format!("barrier height            = {}", opt(d.barrier_height)));
            lines.push(format!("t_dec                     = {}", opt(d.t_dec)));
            lines.push(format!("t_dec/T_P                 = {}", opt(d.t_dec_over_t_p)));
            if let Ok(t) = setup.t_ent_global() {
                lines.push(format!("t_ent                     = {t:.6e}"));
            }
            if let Some(dc) = setup.pointer.delta_class {
                let lambda = setup.pointer.lambda;
                let delta = setup.pointer.delta;
                lines.push(format!(
                    "hierarchy lambda << delta << delta_class: {}",
                    if lambda < delta * 4.0 * std::f64::consts::PI && delta < dc { "holds" } else { "violated" }
                ));
            }
            for n in &d.notes {
                lines.push(format!("note: {n}"));
            }
            outcome.warnings.extend(d.warnings);
        }
    }
    let mut body = String::new();
    for l in sink.header.iter().map(|(k, v)| format!("# {k}: {v}")).chain(lines.iter().cloned()) {
        let _ = writeln!(body, "{l}");
    }
    sink.text("validate", &body)?;
    outcome.report = lines;
    outcome.report.extend(written(sink));
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_parabola_recovers_gaussian_peak() {
        let xs: Vec<f64> = (0..41).map(|k| -2.0 + 0.1 * k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (-(x - 0.237f64).powi(2) / 0.5).exp()).collect();
        assert!((peak_position(&xs, &ys) - 0.237).abs() < 1e-12);
    }

    #[test]
    fn peak_at_edge_falls_back_to_sample() {
        let xs = [0.0, 1.0, 2.0];
        assert_eq!(peak_position(&xs, &[3.0, 2.0, 1.0]), 0.0);
    }

}
