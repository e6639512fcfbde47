use std::fmt::Write;

use origami_core::hitting::ExponentFit;

const W: f64 = 640.0;
const H: f64 = 480.0;
const M: f64 = 60.0;

/// Log-log plot of `(−log r, log T)` with the upper envelope and the fitted line.
pub fn exponent_plot(points: &[(f64, f64)], fit: &ExponentFit, title: &str) -> String {
    let xy: Vec<(f64, f64)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|&(r, t)| (-r.ln(), t.ln())).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &xy {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {b} H{r} M{m} {b} V{m}" stroke="black" fill="none"/>"#,
        m = M,
        b = H - M,
        r = W - M
    );
    for k in 0..=4 {
        let fx = x0 + (x1 - x0) * k as f64 / 4.0;
        let fy = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{fx:.2}</text>"#, sx(fx), H - M + 16.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{fy:.2}</text>"#, M - 6.0, sy(fy) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">−log r</text>"#, W / 2.0, H - 18.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">log T</text>"#,
        H / 2.0,
        H / 2.0
    );
    for &(x, y) in &xy {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(x), sy(y));
    }
    if fit.envelope.len() >= 2 {
        let pts: Vec<String> = fit.envelope.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" stroke="darkorange" stroke-width="2" fill="none"/>"#, pts.join(" "));
    }
    let line = |x: f64| fit.intercept + fit.h_hat * x;
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson" stroke-dasharray="6 4"/>"#,
        sx(x0),
        sy(line(x0)),
        sx(x1),
        sy(line(x1))
    );
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="14">{title}</text>"#, M, M - 24.0);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" fill="crimson">Ĥ = {:.4} ({} envelope points, {:.2} decades)</text>"#,
        M,
        M - 6.0,
        fit.h_hat,
        fit.envelope.len(),
        fit.decades
    );
    s.push_str("</svg>\n");
    s
}
