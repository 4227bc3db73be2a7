use std::fmt::Write;

use carpetlab_core::spectrum::SpectrumCurve;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 320.0;
const PAD: f64 = 40.0;

fn px(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// SVG 1.1 plot of `(α, h(α))`: the sampled curve plus both endpoint limits.
pub fn spectrum_svg(curve: &SpectrumCurve) -> String {
    let mut points: Vec<(f64, f64)> = curve
        .samples
        .iter()
        .map(|s| (s.alpha.to_f64(), s.h.to_f64()))
        .collect();
    points.push((curve.alpha_min.to_f64(), curve.h_at_alpha_min.to_f64()));
    points.push((curve.alpha_max.to_f64(), curve.h_at_alpha_max.to_f64()));
    points.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (a0, a1) = (curve.alpha_min.to_f64(), curve.alpha_max.to_f64());
    let h1 = points.iter().map(|p| p.1).fold(0.0, f64::max);
    // Regular carpets collapse to a single point.
    let aw = if a1 > a0 { a1 - a0 } else { 1.0 };
    let hw = if h1 > 0.0 { h1 } else { 1.0 };
    let x = |a: f64| PAD + (a - a0) / aw * (WIDTH - 2.0 * PAD);
    let y = |h: f64| HEIGHT - PAD - h / hw * (HEIGHT - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = px(WIDTH),
        h = px(HEIGHT)
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r##"<path d="M{l} {t} V{b} H{r}" fill="none" stroke="#000000" stroke-width="1"/>"##,
        l = px(PAD),
        t = px(PAD),
        b = px(HEIGHT - PAD),
        r = px(WIDTH - PAD)
    );
    let path: Vec<String> = points.iter().map(|&(a, h)| format!("{},{}", px(x(a)), px(y(h)))).collect();
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
        path.join(" ")
    );
    for (a, h) in [points[0], points[points.len() - 1]] {
        let _ = writeln!(svg, r##"<circle cx="{}" cy="{}" r="3" fill="#d62728"/>"##, px(x(a)), px(y(h)));
    }
    let label = |v: f64| format!("{v:.6}");
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="11" font-family="monospace">{}</text>"#,
        px(PAD),
        px(HEIGHT - PAD / 3.0),
        label(a0)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="11" font-family="monospace" text-anchor="end">{}</text>"#,
        px(WIDTH - PAD),
        px(HEIGHT - PAD / 3.0),
        label(a1)
    );
    let _ = writeln!(
        svg,
        r#"<text x="4" y="{}" font-size="11" font-family="monospace">h={}</text>"#,
        px(PAD - 8.0),
        label(h1)
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_strings() {
        assert_eq!(px(40.0), "40");
        assert_eq!(px(1.23456), "1.2346");
        assert_eq!(px(-0.00001), "0");
    }
}
