//! Minimal SVG line plot of the stress distribution along the radius.

use std::fmt::Write as _;

use flywheel_core::StressField;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;

/// Radial, tangential and Von Mises stress (N/mm²) against radius (m).
pub fn stress_plot(field: &StressField, title: &str) -> String {
    let series: [(&str, &str, &[f64]); 3] = [
        ("radial", "#1f77b4", &field.sigma_r),
        ("tangential", "#d62728", &field.sigma_theta),
        ("Von Mises", "#2ca02c", &field.sigma_vm),
    ];
    let (r_min, r_max) = bounds(&field.radius);
    let (mut s_min, mut s_max) = series
        .iter()
        .map(|(_, _, v)| bounds(v))
        .fold((0.0_f64, 0.0_f64), |(a, b), (lo, hi)| (a.min(lo), b.max(hi)));
    s_min *= 1e-6;
    s_max *= 1e-6;
    if s_max - s_min < 1e-12 {
        s_max = s_min + 1.0;
    }
    let x_of = |r: f64| MARGIN + (r - r_min) / (r_max - r_min).max(1e-12) * (WIDTH - 2.0 * MARGIN);
    let y_of = |s: f64| HEIGHT - MARGIN - (s - s_min) / (s_max - s_min) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    // axes
    let (x0, x1) = (MARGIN, WIDTH - MARGIN);
    let (y0, y1) = (HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let r = r_min + f * (r_max - r_min);
        let s = s_min + f * (s_max - s_min);
        let (xt, yt) = (x_of(r), y_of(s));
        let _ = writeln!(
            svg,
            r#"<text x="{xt:.1}" y="{:.1}" text-anchor="middle">{r:.3}</text>"#,
            y0 + 18.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{s:.2}</text>"#,
            x0 - 6.0,
            yt + 4.0
        );
    }
    if s_min < 0.0 {
        let yz = y_of(0.0);
        let _ = writeln!(
            svg,
            r##"<line x1="{x0}" y1="{yz:.1}" x2="{x1}" y2="{yz:.1}" stroke="#999" stroke-dasharray="4 3"/>"##
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">radius (m)</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(16,{}) rotate(-90)" text-anchor="middle">stress (N/mm²)</text>"#,
        HEIGHT / 2.0
    );

    for (k, (name, colour, values)) in series.iter().enumerate() {
        let points: Vec<String> = field
            .radius
            .iter()
            .zip(values.iter())
            .map(|(&r, &s)| format!("{:.2},{:.2}", x_of(r), y_of(s * 1e-6)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.8" points="{}"/>"#,
            points.join(" ")
        );
        let ly = MARGIN + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}">{name}</text>"#,
            x1 - 130.0,
            x1 - 110.0,
            x1 - 104.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
