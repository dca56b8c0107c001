use std::fmt::Write;

use super::BerCurve;

const W: f64 = 760.0;
const H: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 230.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const COLORS: [&str; 10] =
    ["#000000", "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Self-contained SVG of log10(BER) against ROP with a dashed line at the
/// FEC threshold. Zero-error points are not drawn.
pub fn waterfall_svg(curves: &[BerCurve], threshold: f64) -> String {
    let pts = curves.iter().flat_map(|c| c.points.iter());
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ymin = threshold.log10();
    for p in pts {
        xmin = xmin.min(p.rop_dbm);
        xmax = xmax.max(p.rop_dbm);
        if p.ber > 0.0 {
            ymin = ymin.min(p.ber.log10());
        }
    }
    if !xmin.is_finite() {
        (xmin, xmax) = (-20.0, 0.0);
    }
    let (xmin, mut xmax) = (xmin.floor(), xmax.ceil());
    if xmax <= xmin {
        xmax = xmin + 1.0;
    }
    let ymin = ymin.floor().max(-12.0);
    let ymax = 0.0;
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - xmin) / (xmax - xmin) * pw;
    let sy = |y: f64| TOP + (ymax - y.clamp(ymin, ymax)) / (ymax - ymin) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let mut y = ymin;
    while y <= ymax + 1e-9 {
        let py = sy(y);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            py + 4.0,
            y as i64
        );
        y += 1.0;
    }
    let step = ((xmax - xmin) / 10.0).ceil().max(1.0);
    let mut x = xmin;
    while x <= xmax + 1e-9 {
        let px = sx(x);
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#dddddd"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{x}</text>"##,
            TOP + ph,
            TOP + ph + 18.0
        );
        x += step;
    }
    let _ =
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">ROP (dBm)</text>"#, LEFT + pw / 2.0, H - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">BER</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    let ty = sy(threshold.log10());
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="red" stroke-dasharray="6,4"/><text x="{:.2}" y="{:.2}" fill="red" text-anchor="end">FEC {threshold:.1e}</text>"#,
        LEFT + pw,
        LEFT + pw - 4.0,
        ty - 4.0
    );
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = c
            .points
            .iter()
            .filter(|p| p.ber > 0.0)
            .map(|p| format!("{:.2},{:.2}", sx(p.rop_dbm), sy(p.ber.log10())))
            .collect();
        let _ =
            writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, coords.join(" "));
        for xy in &coords {
            let (cx, cy) = xy.split_once(',').unwrap_or(("0", "0"));
            let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&c.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::BerPoint;

    #[test]
    fn svg_is_well_formed_and_labelled() {
        let c = BerCurve::new(
            "a<b",
            vec![
                BerPoint { rop_dbm: -10.0, ber: 1e-2, n_bits: 1000, n_errors: 10 },
                BerPoint { rop_dbm: -9.0, ber: 0.0, n_bits: 1000, n_errors: 0 },
            ],
        )
        .unwrap();
        let svg = waterfall_svg(&[c], 3.8e-3);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a&lt;b"));
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(waterfall_svg(&[], 3.8e-3).matches("<polyline").count(), 0);
    }
}
