//! Standalone SVG line plots, box plots and heat maps.

use std::fmt::Write as _;

use crate::stats::Quantiles;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

#[derive(Debug, Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = values
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            lo = 0.0;
            hi = 1.0;
        }
        if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
            lo -= 0.5 * lo.abs().max(1.0);
            hi += 0.5 * hi.abs().max(1.0);
        }
        let pad = 0.05 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            px_lo,
            px_hi,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self, count: usize) -> Vec<f64> {
        (0..count)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (count - 1) as f64)
            .collect()
    }
}

struct Canvas {
    svg: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            (LEFT + WIDTH - RIGHT) / 2.0,
            escape(title)
        );
        Self { svg }
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, extra: &str) {
        let _ = writeln!(
            self.svg,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" {extra}/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.svg,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    }

    fn frame(&mut self, x_label: &str, y_label: &str) {
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
        self.line(x0, y0, x1, y0, "black", "");
        self.line(x0, y0, x0, y1, "black", "");
        self.text((x0 + x1) / 2.0, HEIGHT - 18.0, "middle", x_label);
        let _ = writeln!(
            self.svg,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
    }

    fn y_axis(&mut self, sy: &Scale) {
        for t in sy.ticks(5) {
            let y = sy.map(t);
            self.line(LEFT - 4.0, y, LEFT, y, "black", "");
            self.text(LEFT - 6.0, y + 4.0, "end", &fmt_tick(t));
        }
    }

    fn legend(&mut self, entries: &[(String, &str, bool)]) {
        let x = WIDTH - RIGHT + 12.0;
        for (k, (label, colour, dashed)) in entries.iter().enumerate() {
            let y = TOP + 10.0 + 18.0 * k as f64;
            let dash = if *dashed { r#"stroke-dasharray="5,3""# } else { "" };
            self.line(x, y, x + 22.0, y, colour, &format!(r#"stroke-width="2" {dash}"#));
            self.text(x + 28.0, y + 4.0, "start", label);
        }
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

#[derive(Debug, Clone)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl LinePlot {
    pub fn to_svg(&self) -> String {
        let all = || self.series.iter().flat_map(|s| s.points.iter());
        let sx = Scale::new(all().map(|p| p.0), LEFT, WIDTH - RIGHT);
        let sy = Scale::new(all().map(|p| p.1), HEIGHT - BOTTOM, TOP);
        let mut c = Canvas::new(&self.title);
        c.frame(&self.x_label, &self.y_label);
        c.y_axis(&sy);
        for t in sx.ticks(6) {
            let x = sx.map(t);
            c.line(x, HEIGHT - BOTTOM, x, HEIGHT - BOTTOM + 4.0, "black", "");
            c.text(x, HEIGHT - BOTTOM + 18.0, "middle", &fmt_tick(t));
        }
        let mut legend = Vec::new();
        for (k, s) in self.series.iter().enumerate() {
            let colour = PALETTE[k % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|p| format!("{:.2},{:.2}", sx.map(p.0), sy.map(p.1)))
                .collect();
            let dash = if s.dashed { r#" stroke-dasharray="5,3""# } else { "" };
            let _ = writeln!(
                c.svg,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="2"{dash} points="{}"/>"#,
                pts.join(" ")
            );
            legend.push((s.label.clone(), colour, s.dashed));
        }
        c.legend(&legend);
        c.finish()
    }
}

#[derive(Debug, Clone)]
pub struct BoxItem {
    pub label: String,
    pub q: Quantiles,
}

/// Whiskers span the 5–95 % markers; the box spans 25–50 % with the median
/// drawn as a thick bar.
#[derive(Debug, Clone)]
pub struct BoxPlot {
    pub title: String,
    pub y_label: String,
    pub boxes: Vec<BoxItem>,
}

impl BoxPlot {
    pub fn to_svg(&self) -> String {
        let sy = Scale::new(
            self.boxes.iter().flat_map(|b| [b.q.q05, b.q.q95]),
            HEIGHT - BOTTOM,
            TOP,
        );
        let mut c = Canvas::new(&self.title);
        c.frame("", &self.y_label);
        c.y_axis(&sy);
        let n = self.boxes.len().max(1) as f64;
        let slot = (WIDTH - RIGHT - LEFT) / n;
        for (k, b) in self.boxes.iter().enumerate() {
            let colour = PALETTE[k % PALETTE.len()];
            let cx = LEFT + slot * (k as f64 + 0.5);
            let half = (slot * 0.3).min(30.0);
            c.line(cx, sy.map(b.q.q05), cx, sy.map(b.q.q95), colour, "");
            for q in [b.q.q05, b.q.q95] {
                c.line(cx - half / 2.0, sy.map(q), cx + half / 2.0, sy.map(q), colour, "");
            }
            let (top, bot) = (sy.map(b.q.q50), sy.map(b.q.q25));
            let _ = writeln!(
                c.svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{colour}" fill-opacity="0.3" stroke="{colour}"/>"#,
                cx - half,
                top.min(bot),
                2.0 * half,
                (bot - top).abs()
            );
            c.line(cx - half, top, cx + half, top, colour, r#"stroke-width="3""#);
            c.text(cx, HEIGHT - BOTTOM + 18.0, "middle", &b.label);
        }
        c.finish()
    }
}

/// Count matrix with rows along the y axis and columns along the x axis.
#[derive(Debug, Clone)]
pub struct Heatmap {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_ticks: Vec<String>,
    pub y_ticks: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl Heatmap {
    pub fn to_svg(&self) -> String {
        let rows = self.values.len().max(1);
        let cols = self.values.first().map_or(1, |r| r.len().max(1));
        let max = self
            .values
            .iter()
            .flatten()
            .copied()
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let cw = (WIDTH - RIGHT - LEFT) / cols as f64;
        let ch = (HEIGHT - BOTTOM - TOP) / rows as f64;
        let mut c = Canvas::new(&self.title);
        c.frame(&self.x_label, &self.y_label);
        for (i, row) in self.values.iter().enumerate() {
            // first row at the bottom
            let y = HEIGHT - BOTTOM - ch * (i as f64 + 1.0);
            for (j, &v) in row.iter().enumerate() {
                let x = LEFT + cw * j as f64;
                let shade = 255.0 - 200.0 * (v / max);
                let _ = writeln!(
                    c.svg,
                    r#"<rect x="{x:.2}" y="{y:.2}" width="{cw:.2}" height="{ch:.2}" fill="rgb({s},{s},255)" stroke="white"/>"#,
                    s = shade.round() as u8
                );
                if v > 0.0 {
                    c.text(x + cw / 2.0, y + ch / 2.0 + 4.0, "middle", &fmt_tick(v));
                }
            }
            if let Some(t) = self.y_ticks.get(i) {
                c.text(LEFT - 6.0, y + ch / 2.0 + 4.0, "end", t);
            }
        }
        for (j, t) in self.x_ticks.iter().enumerate() {
            c.text(LEFT + cw * (j as f64 + 0.5), HEIGHT - BOTTOM + 18.0, "middle", t);
        }
        c.finish()
    }
}
