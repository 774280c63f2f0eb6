//! Minimal SVG plotting: axes, polylines, markers and height-field rasters.
//!
//! Fixed styling: height fields use a diverging map from blue (negative)
//! through white to red (positive), scaled symmetrically by the largest
//! absolute value; zero contours are dashed black, junctions are hollow black
//! circles, gaits are solid coloured lines.

use std::fmt::Write;

use gaitforge_core::geometry::HeightField;

pub const PURPLE: &str = "#7b3294";
pub const RED: &str = "#d7191c";
pub const BLUE: &str = "#2c7bb6";
pub const GREEN: &str = "#1a9641";
pub const ORANGE: &str = "#fdae61";
pub const GREY: &str = "#888888";

/// Cells drawn along each axis of a height-field raster.
const RASTER_CELLS: usize = 120;

const W: f64 = 640.0;
const H: f64 = 520.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

pub struct Plot {
    x: (f64, f64),
    y: (f64, f64),
    body: String,
    legend: Vec<(String, String, bool)>,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let p = 10f64.powf(raw.log10().floor());
    let m = raw / p;
    let f = if m < 1.5 {
        1.0
    } else if m < 3.5 {
        2.0
    } else if m < 7.5 {
        5.0
    } else {
        10.0
    };
    f * p
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a - 1.0, a + 1.0) };
        Plot { x: pad(x), y: pad(y), body: String::new(), legend: Vec::new() }
    }

    /// Square data aspect for shape-space plots.
    pub fn shape_space(x: (f64, f64), y: (f64, f64)) -> Self {
        let half = 0.5 * (x.1 - x.0).max(y.1 - y.0);
        let (cx, cy) = (0.5 * (x.0 + x.1), 0.5 * (y.0 + y.1));
        Plot::new((cx - half, cx + half), (cy - half, cy + half))
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (H - TOP - BOTTOM)
    }

    pub fn raster(&mut self, field: &HeightField) {
        let (lo, hi) = field.range();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let w = &field.window;
        let cells = RASTER_CELLS.min(field.n - 1);
        let (dx, dy) = ((w.phi1.1 - w.phi1.0) / cells as f64, (w.phi2.1 - w.phi2.0) / cells as f64);
        for j in 0..cells {
            for i in 0..cells {
                let p = gaitforge_core::ShapePoint::new(w.phi1.0 + (i as f64 + 0.5) * dx, w.phi2.0 + (j as f64 + 0.5) * dy);
                let v = (field.interpolate(p) / scale).clamp(-1.0, 1.0);
                let (x0, x1) = (self.px(w.phi1.0 + i as f64 * dx), self.px(w.phi1.0 + (i + 1) as f64 * dx));
                let (y0, y1) = (self.py(w.phi2.0 + (j + 1) as f64 * dy), self.py(w.phi2.0 + j as f64 * dy));
                let _ = writeln!(
                    self.body,
                    r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{}" shape-rendering="crispEdges"/>"#,
                    x1 - x0 + 0.3,
                    y1 - y0 + 0.3,
                    diverging(v)
                );
            }
        }
    }

    pub fn line(&mut self, pts: &[(f64, f64)], color: &str, width: f64, dashed: bool, closed: bool) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (k, &(x, y)) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if k == 0 { "M" } else { " L" }, self.px(x), self.py(y));
        }
        if closed {
            d.push_str(" Z");
        }
        let dash = if dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="{width}"{dash}/>"#
        );
    }

    pub fn marker(&mut self, p: (f64, f64), color: &str, label: Option<&str>) {
        let (x, y) = (self.px(p.0), self.py(p.1));
        let _ = writeln!(
            self.body,
            r#"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="{color}" stroke-width="2.5"/>"#,
            x - 6.0,
            y - 6.0,
            x + 6.0,
            y + 6.0,
            x - 6.0,
            y + 6.0,
            x + 6.0,
            y - 6.0
        );
        if let Some(l) = label {
            let _ = writeln!(
                self.body,
                r#"<text x="{:.2}" y="{:.2}" font-size="11" fill="{color}">{}</text>"#,
                x + 8.0,
                y - 8.0,
                esc(l)
            );
        }
    }

    pub fn ring(&mut self, p: (f64, f64), radius_px: f64) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{radius_px:.1}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            self.px(p.0),
            self.py(p.1)
        );
    }

    pub fn hline(&mut self, y: f64, color: &str) {
        self.line(&[(self.x.0, y), (self.x.1, y)], color, 0.8, false, false);
    }

    pub fn legend(&mut self, label: &str, color: &str, dashed: bool) {
        self.legend.push((label.to_string(), color.to_string(), dashed));
    }

    pub fn render(&self, title: &str, xlabel: &str, ylabel: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let (x0, x1, y0, y1) = (self.px(self.x.0), self.px(self.x.1), self.py(self.y.1), self.py(self.y.0));
        let _ = writeln!(s, r#"<clipPath id="plot"><rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#, x1 - x0, y1 - y0);
        let _ = writeln!(s, r#"<g clip-path="url(#plot)">"#);
        s.push_str(&self.body);
        s.push_str("</g>\n");
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y1 - y0
        );
        for (axis, (a, b)) in [(0, self.x), (1, self.y)] {
            let step = nice_step(b - a);
            let mut t = (a / step).ceil() * step;
            while t <= b + 1e-9 * step {
                let v = if t.abs() < 1e-12 * step { 0.0 } else { t };
                let label = format!("{}", (v / step).round() * step);
                let label = if label.len() > 8 { format!("{v:.3}") } else { label };
                if axis == 0 {
                    let x = self.px(v);
                    let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y1:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y1 + 5.0);
                    let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">{label}</text>"#, y1 + 19.0);
                } else {
                    let y = self.py(v);
                    let _ = writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
                    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{label}</text>"#, x0 - 8.0, y + 4.0);
                }
                t += step;
            }
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="24" font-size="15" text-anchor="middle">{}</text>"#, 0.5 * (x0 + x1), esc(title));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#, 0.5 * (x0 + x1), H - 12.0, esc(xlabel));
        let _ = writeln!(
            s,
            r#"<text x="18" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            0.5 * (y0 + y1),
            0.5 * (y0 + y1),
            esc(ylabel)
        );
        if !self.legend.is_empty() {
            let width = 50.0 + 7.0 * self.legend.iter().map(|l| l.0.len()).max().unwrap_or(0) as f64;
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{width:.2}" height="{:.2}" fill="white" fill-opacity="0.8" stroke="{GREY}"/>"#,
                x0 + 4.0,
                y0 + 4.0,
                16.0 * self.legend.len() as f64 + 8.0
            );
        }
        for (k, (label, color, dashed)) in self.legend.iter().enumerate() {
            let y = y0 + 16.0 + 16.0 * k as f64;
            let dash = if *dashed { r#" stroke-dasharray="6,4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2.5"{dash}/>"#,
                x0 + 10.0,
                x0 + 34.0
            );
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#, x0 + 40.0, y + 4.0, esc(label));
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Blue-white-red for `v` in `[-1, 1]`.
pub fn diverging(v: f64) -> String {
    let (neg, pos) = ((33.0, 102.0, 172.0), (178.0, 24.0, 43.0));
    let t = v.abs();
    let c = if v < 0.0 { neg } else { pos };
    let mix = |a: f64| (255.0 + (a - 255.0) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(c.0), mix(c.1), mix(c.2))
}
