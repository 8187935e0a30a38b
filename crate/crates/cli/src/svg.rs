//! Fixed-layout SVG rendering of thermo-majorization curves.

use std::fmt::Write;

use thermoflow::thermo_curve::ThermoCurve;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

pub fn render(curves: &[ThermoCurve]) -> String {
    let span = curves.iter().map(ThermoCurve::width).fold(0.0, f64::max);
    let span = if span > 0.0 { span } else { 1.0 };
    let sx = |x: f64| MARGIN + x / span * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - y * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<polyline points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="none" stroke="black" stroke-width="1"/>"#,
        sx(0.0),
        sy(1.0),
        sx(0.0),
        sy(0.0),
        sx(span),
        sy(0.0)
    );
    for (k, c) in curves.iter().enumerate() {
        let points: Vec<String> = c
            .vertices()
            .iter()
            .map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            points.join(" "),
            COLORS[k % COLORS.len()]
        );
    }
    s.push_str("</svg>\n");
    s
}
