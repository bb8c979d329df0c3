//! Minimal static SVG line/scatter plots. Output depends only on the data, so
//! reruns are byte-identical.

use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#555555"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dashed,
    Dots,
    /// Larger markers, each with its own text label.
    Markers,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    /// NaN in either coordinate breaks a line into separate segments.
    pub points: Vec<(f64, f64)>,
    pub style: Style,
    pub color: Option<&'static str>,
    pub point_labels: Vec<String>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: Style) -> Self {
        Self { label: label.into(), points, style, color: None, point_labels: vec![] }
    }

    pub fn color(mut self, c: &'static str) -> Self {
        self.color = Some(c);
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn nice_ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / n as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = vec![];
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), series: vec![] }
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        let mut xb = (f64::INFINITY, f64::NEG_INFINITY);
        let mut yb = xb;
        for s in &self.series {
            for &(x, y) in &s.points {
                if x.is_finite() && y.is_finite() {
                    xb = (xb.0.min(x), xb.1.max(x));
                    yb = (yb.0.min(y), yb.1.max(y));
                }
            }
        }
        let pad = |b: (f64, f64)| {
            if !b.0.is_finite() {
                return (0.0, 1.0);
            }
            let d = if b.1 > b.0 { 0.05 * (b.1 - b.0) } else { 0.5 * b.0.abs().max(1.0) };
            (b.0 - d, b.1 + d)
        };
        (pad(xb), pad(yb))
    }

    pub fn render(&self) -> String {
        let ((x0, x1), (y0, y1)) = self.bounds();
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, escape(&self.title));
        let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        for t in nice_ticks(x0, x1, 6) {
            let px = sx(t);
            let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
            let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, fmt_tick(t));
        }
        for t in nice_ticks(y0, y1, 6) {
            let py = sy(t);
            let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/>"#, LEFT - 5.0);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, py + 4.0, fmt_tick(t));
        }
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 12.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );
        let _ = writeln!(s, r#"<clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath>"#);
        let _ = writeln!(s, r#"<g clip-path="url(#plot)">"#);
        for (i, ser) in self.series.iter().enumerate() {
            let color = ser.color.unwrap_or(PALETTE[i % PALETTE.len()]);
            match ser.style {
                Style::Line | Style::Dashed => {
                    let dash = if ser.style == Style::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let mut d = String::new();
                    let mut pen_down = false;
                    for &(x, y) in &ser.points {
                        if !(x.is_finite() && y.is_finite()) {
                            pen_down = false;
                            continue;
                        }
                        let _ = write!(d, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, sx(x), sy(y));
                        pen_down = true;
                    }
                    if !d.is_empty() {
                        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.6"{dash}/>"#, d.trim_end());
                    }
                }
                Style::Dots | Style::Markers => {
                    let r = if ser.style == Style::Dots { 2.2 } else { 4.5 };
                    for (k, &(x, y)) in ser.points.iter().enumerate() {
                        if x.is_finite() && y.is_finite() {
                            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{color}"/>"#, sx(x), sy(y));
                            if let Some(l) = ser.point_labels.get(k) {
                                let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#, sx(x) + 6.0, sy(y) - 6.0, escape(l));
                            }
                        }
                    }
                }
            }
        }
        let _ = writeln!(s, "</g>");
        for (i, ser) in self.series.iter().enumerate().filter(|(_, s)| !s.label.is_empty()) {
            let color = ser.color.unwrap_or(PALETTE[i % PALETTE.len()]);
            let y = TOP + 16.0 + 16.0 * i as f64;
            let _ = writeln!(s, r#"<rect x="{:.1}" y="{:.1}" width="12" height="4" fill="{color}"/>"#, W - RIGHT - 170.0, y - 4.0);
            let _ = writeln!(s, r#"<text x="{:.1}" y="{y:.1}">{}</text>"#, W - RIGHT - 152.0, escape(&ser.label));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn fmt_tick(t: f64) -> String {
    let s = format!("{t:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}
