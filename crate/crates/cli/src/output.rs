//! CSV and SVG emission.

use std::fmt::Write;

/// 17 significant digits, round-trip exact.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub struct Csv {
    buf: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Csv { buf, width: header.len() }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.width);
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;

/// Line plot of `(ε, L)` with dashed guide lines of slope `2πk` for every
/// integer `k` between the smallest and largest measured slope, each anchored
/// at the first point whose slope rounds to `k`.
pub fn profile_svg(eps: &[f64], values: &[f64], slopes: &[f64]) -> String {
    let (x0, x1) = (eps[0], eps[eps.len() - 1]);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (y0, y1) = if hi - lo < 1e-9 { (lo - 0.5, hi + 0.5) } else { (lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo)) };
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<defs><clipPath id="plot"><rect x="{PAD}" y="{PAD}" width="{}" height="{}"/></clipPath></defs>"#, W - 2.0 * PAD, H - 2.0 * PAD).unwrap();
    writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    )
    .unwrap();
    for i in 0..=4 {
        let x = x0 + (x1 - x0) * i as f64 / 4.0;
        let y = y0 + (y1 - y0) * i as f64 / 4.0;
        writeln!(s, r#"<text x="{:.1}" y="{}" font-size="11" text-anchor="middle">{:.3}</text>"#, px(x), H - PAD + 16.0, x).unwrap();
        writeln!(s, r#"<text x="{}" y="{:.1}" font-size="11" text-anchor="end">{:.3}</text>"#, PAD - 6.0, py(y) + 4.0, y).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">ε</text>"#, W / 2.0, H - 10.0).unwrap();
    writeln!(s, r#"<text x="14" y="{}" font-size="13" text-anchor="middle">L</text>"#, H / 2.0).unwrap();

    let smin = slopes.iter().copied().fold(f64::INFINITY, f64::min).round() as i64;
    let smax = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max).round() as i64;
    writeln!(s, r##"<g clip-path="url(#plot)" stroke="#999" stroke-dasharray="4 3" fill="none">"##).unwrap();
    for k in smin..=smax {
        let i = slopes.iter().position(|&v| v.round() as i64 == k).unwrap_or(0);
        let line = |x: f64| values[i] + 2.0 * std::f64::consts::PI * k as f64 * (x - eps[i]);
        writeln!(s, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"><title>slope {k}</title></line>"#, px(x0), py(line(x0)), px(x1), py(line(x1))).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    let points: Vec<String> = eps.iter().zip(values).map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    writeln!(s, r##"<polyline points="{}" fill="none" stroke="#1f4e9c" stroke-width="2"/>"##, points.join(" ")).unwrap();
    s.push_str("</svg>\n");
    s
}
