//! Minimal SVG plots.

use std::fmt::Write;

use urquhart_core::evaluation::ExperimentReport;
use urquhart_core::Point2;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

fn header(title: &str) -> String {
    let mut s = String::new();
    let total = SIZE + 2.0 * MARGIN;
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#, total / 2.0).unwrap();
    writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    s
}

/// Precision against recall, one polyline per (omega, sigma) cell; colour
/// encodes sigma and opacity encodes omega.
pub fn pr_curves(report: &ExperimentReport) -> String {
    let mut s = header("Precision-recall per (omega, sigma)");
    let to_px = |recall: f64, precision: f64| (MARGIN + recall * SIZE, MARGIN + (1.0 - precision) * SIZE);
    for k in 0..=4 {
        let v = k as f64 / 4.0;
        let (x, y) = to_px(v, v);
        writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">{v:.2}</text>"#, MARGIN + SIZE + 16.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{v:.2}</text>"#, MARGIN - 6.0, y + 4.0).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">recall</text>"#, MARGIN + SIZE / 2.0, MARGIN + SIZE + 36.0).unwrap();
    writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">precision</text>"#,
        MARGIN + SIZE / 2.0,
        MARGIN + SIZE / 2.0
    )
    .unwrap();
    let omega_max = report.omegas.iter().copied().fold(f64::MIN, f64::max);
    let omega_min = report.omegas.iter().copied().fold(f64::MAX, f64::min);
    for cell in &report.cells {
        let si = report.sigmas.iter().position(|&v| v == cell.sigma).unwrap_or(0);
        let colour = PALETTE[si % PALETTE.len()];
        let opacity = if omega_max > omega_min {
            0.3 + 0.7 * (cell.omega - omega_min) / (omega_max - omega_min)
        } else {
            1.0
        };
        let points: Vec<String> = cell
            .pr
            .iter()
            .map(|p| {
                let (x, y) = to_px(p.recall, p.precision);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-opacity="{opacity:.2}" stroke-width="1.5"/>"#,
            points.join(" ")
        )
        .unwrap();
    }
    for (si, sigma) in report.sigmas.iter().enumerate() {
        let y = MARGIN + SIZE - 16.0 * (report.sigmas.len() - si) as f64;
        let colour = PALETTE[si % PALETTE.len()];
        writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{colour}"/>"#, MARGIN + 10.0, y - 9.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{y}">sigma {sigma}</text>"#, MARGIN + 26.0).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Scatter of landmark positions scaled to fit the plot.
pub fn scatter(title: &str, points: &[Point2]) -> String {
    let mut s = header(title);
    if points.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    for p in points {
        let x = MARGIN + (p.x - lo.x) / span * SIZE;
        let y = MARGIN + SIZE - (p.y - lo.y) / span * SIZE;
        writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="{}"/>"#, PALETTE[0]).unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{} landmarks, {span:.1} m across</text>"#,
        MARGIN + SIZE / 2.0,
        MARGIN + SIZE + 20.0,
        points.len()
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}
