use std::fmt::Write as _;

use buls::experiments::QQSeries;

const SIZE: f64 = 480.0;
const PAD: f64 = 48.0;

/// Scatter of the QQ pairs with the 45° reference line.
pub fn qq_svg(q: &QQSeries) -> String {
    let hi = q.pairs.iter().fold(0.0f64, |m, &(t, e)| m.max(t).max(e)).max(1e-12) * 1.05;
    let span = SIZE - 2.0 * PAD;
    let px = |v: f64| PAD + v / hi * span;
    let py = |v: f64| SIZE - PAD - v / hi * span;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r##"<rect x="{PAD}" y="{PAD}" width="{span}" height="{span}" fill="none" stroke="#999"/>"##);
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="1.5"/>"##,
        px(0.0),
        py(0.0),
        px(hi),
        py(hi)
    );
    for &(t, e) in &q.pairs {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f4e79"/>"##, px(t), py(e));
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">theoretical quantile ({})</text>"#,
        SIZE / 2.0,
        SIZE - 12.0,
        q.gen
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 14 {})">squared Mahalanobis distance</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    let _ = writeln!(s, r#"<text x="{PAD}" y="{}" font-size="11">0</text>"#, SIZE - PAD + 14.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{:.3}</text>"#, SIZE - PAD, SIZE - PAD + 14.0, hi);
    s.push_str("</svg>\n");
    s
}
