//! CSV tables with `#` metadata headers and minimal SVG line plots.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::Failure;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) if v.is_nan() => "NaN".into(),
            Cell::Num(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn write(&self, path: &Path, header: &[(String, String)]) -> Result<(), Failure> {
        let mut file = File::create(path).map_err(|e| Failure::io(path, e))?;
        for (k, v) in header.iter().chain(&self.metadata) {
            writeln!(file, "# {k}: {v}").map_err(|e| Failure::io(path, e))?;
        }
        let mut w = csv::Writer::from_writer(file);
        w.write_record(&self.columns).map_err(|e| Failure::io(path, e))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(|e| Failure::io(path, e))?;
        }
        w.flush().map_err(|e| Failure::io(path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stroke {
    Solid,
    Dashed,
    Dotted,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub stroke: Stroke,
    pub color: usize,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#7f7f7f"];

fn nice_ticks(lo: f64, hi: f64, log: bool) -> Vec<f64> {
    if log {
        let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
        let step = ((b - a) as f64 / 8.0).ceil().max(1.0) as i32;
        return (a..=b).step_by(step as usize).map(|e| e as f64).filter(|e| *e >= lo.log10() - 1e-9 && *e <= hi.log10() + 1e-9).collect();
    }
    let span = hi - lo;
    if span <= 0.0 {
        return vec![lo];
    }
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|f| f * mag).find(|s| span / s <= 8.0).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

impl Plot {
    pub fn render(&self) -> String {
        let (w, h) = (720.0, 480.0);
        let (left, right, top, bottom) = (80.0, 200.0, 40.0, 60.0);
        let tx = |v: f64| if self.log_x { v.log10() } else { v };
        let ty = |v: f64| if self.log_y { v.log10() } else { v };
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .filter(|&(x, y)| x.is_finite() && y.is_finite() && (!self.log_x || x > 0.0) && (!self.log_y || y > 0.0))
            .map(|(x, y)| (tx(x), ty(y)))
            .collect();
        let mut svg = String::new();
        let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, left + (w - left - right) / 2.0, escape(&self.title));
        if pts.is_empty() {
            svg.push_str("</svg>\n");
            return svg;
        }
        let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY), |a, p| {
            (a.0.min(p.0), a.1.max(p.0), a.2.min(p.1), a.3.max(p.1))
        });
        if x1 == x0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 == y0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pad = 0.04 * (y1 - y0);
        let (y0, y1) = (y0 - pad, y1 + pad);
        let pw = w - left - right;
        let ph = h - top - bottom;
        let sx = |v: f64| left + (v - x0) / (x1 - x0) * pw;
        let sy = |v: f64| top + ph - (v - y0) / (y1 - y0) * ph;
        let _ = writeln!(svg, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        let fmt_tick = |v: f64, log: bool| if log { format!("1e{}", v as i32) } else { format!("{v}") };
        let span_x = if self.log_x { (10f64.powf(x0), 10f64.powf(x1)) } else { (x0, x1) };
        for t in nice_ticks(span_x.0, span_x.1, self.log_x) {
            if t < x0 || t > x1 {
                continue;
            }
            let _ = writeln!(svg, r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/>"#, sx(t), top + ph, top + ph + 5.0);
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, sx(t), top + ph + 18.0, fmt_tick(t, self.log_x));
        }
        let span_y = if self.log_y { (10f64.powf(y0), 10f64.powf(y1)) } else { (y0, y1) };
        for t in nice_ticks(span_y.0, span_y.1, self.log_y) {
            if t < y0 || t > y1 {
                continue;
            }
            let _ = writeln!(svg, r#"<line x1="{:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="black"/>"#, left - 5.0, sy(t), left);
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, left - 8.0, sy(t) + 4.0, fmt_tick(t, self.log_y));
        }
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, left + pw / 2.0, h - 16.0, escape(&self.x_label));
        let _ = writeln!(
            svg,
            r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">{1}</text>"#,
            top + ph / 2.0,
            escape(&self.y_label)
        );
        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[s.color % PALETTE.len()];
            let dash = match s.stroke {
                Stroke::Solid => "",
                Stroke::Dashed => r#" stroke-dasharray="8 4""#,
                Stroke::Dotted => r#" stroke-dasharray="2 3""#,
            };
            let mut path = String::new();
            let mut pen_down = false;
            for &(x, y) in &s.points {
                let ok = x.is_finite() && y.is_finite() && (!self.log_x || x > 0.0) && (!self.log_y || y > 0.0);
                if !ok {
                    pen_down = false;
                    continue;
                }
                let _ = write!(path, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, sx(tx(x)), sy(ty(y)));
                pen_down = true;
            }
            if !path.is_empty() {
                let _ = writeln!(svg, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#, path.trim_end());
            }
            let ly = top + 14.0 + 16.0 * k as f64;
            let lx = w - right + 12.0;
            let _ = writeln!(svg, r#"<line x1="{lx}" y1="{0}" x2="{1}" y2="{0}" stroke="{color}" stroke-width="1.5"{dash}/>"#, ly - 4.0, lx + 24.0);
            let _ = writeln!(svg, r#"<text x="{}" y="{ly}">{}</text>"#, lx + 30.0, escape(&s.label));
        }
        svg.push_str("</svg>\n");
        svg
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        std::fs::write(path, self.render()).map_err(|e| Failure::io(path, e))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Output location and formats shared by all commands.
#[derive(Debug, Clone)]
pub struct Sink {
    pub prefix: String,
    pub csv: bool,
    pub svg: bool,
    pub header: Vec<(String, String)>,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn path(&self, name: &str, ext: &str) -> PathBuf {
        PathBuf::from(format!("{}_{name}.{ext}", self.prefix))
    }

    pub fn table(&mut self, name: &str, table: &Table) -> Result<(), Failure> {
        if self.csv {
            let p = self.path(name, "csv");
            table.write(&p, &self.header)?;
            self.written.push(p);
        }
        Ok(())
    }

    pub fn plot(&mut self, name: &str, plot: &Plot) -> Result<(), Failure> {
        if self.svg {
            let p = self.path(name, "svg");
            plot.write(&p)?;
            self.written.push(p);
        }
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), Failure> {
        let p = self.path(name, "txt");
        std::fs::write(&p, body).map_err(|e| Failure::io(&p, e))?;
        self.written.push(p);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_render_with_17_digits() {
        assert_eq!(Cell::Num(0.1).render(), "1.0000000000000001e-1");
        assert_eq!(Cell::Num(f64::NAN).render(), "NaN");
        assert_eq!(Cell::from(true).render(), "1");
        let v: f64 = Cell::Num(std::f64::consts::PI).render().parse().unwrap();
        assert_eq!(v, std::f64::consts::PI);
    }

    #[test]
    fn plot_renders_all_series() {
        let plot = Plot {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: true,
            log_y: true,
            series: vec![
                Series { label: "a".into(), points: vec![(1.0, 1.0), (10.0, 100.0)], stroke: Stroke::Solid, color: 0 },
                Series { label: "b".into(), points: vec![(1.0, 2.0), (0.0, 3.0), (10.0, 50.0)], stroke: Stroke::Dashed, color: 1 },
            ],
        };
        let svg = plot.render();
        assert_eq!(svg.matches("<path").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
