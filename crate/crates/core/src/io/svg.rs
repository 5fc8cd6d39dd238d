//! Deterministic SVG rendering at 100 pixels per unit length.

use std::fmt::Write;

use crate::model::{BroadcastSet, StripInstance};

pub const PIXELS_PER_UNIT: f64 = 100.0;
const MARGIN: f64 = 0.25;
const MARKER_RADIUS: f64 = 3.0;

fn px(v: f64) -> String {
    let s = format!("{:.3}", v * PIXELS_PER_UNIT);
    // Avoid "-0.000" so output does not depend on the sign of zero.
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000".into()
    } else {
        s
    }
}

/// Renders points, the strip boundary (if any) and the disks of `active`.
/// Coordinates are used as given, without normalization.
pub fn render_svg(instance: &StripInstance, active: Option<&BroadcastSet>) -> String {
    let r = instance.radius;
    let pts = &instance.points;
    let reach = if active.is_some_and(|a| !a.is_empty()) { r } else { 0.0 };
    let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&crate::model::Point) -> f64| {
        pts.iter().map(sel).fold(init, f)
    };
    let mut x0 = fold(f64::min, f64::INFINITY, |p| p.x) - reach - MARGIN;
    let mut x1 = fold(f64::max, f64::NEG_INFINITY, |p| p.x) + reach + MARGIN;
    let (mut y0, mut y1) = (
        fold(f64::min, f64::INFINITY, |p| p.y) - reach - MARGIN,
        fold(f64::max, f64::NEG_INFINITY, |p| p.y) + reach + MARGIN,
    );
    if let Some(w) = instance.width {
        y0 = y0.min(-MARGIN);
        y1 = y1.max(w + MARGIN);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let (width, height) = (x1 - x0, y1 - y0);
    let tx = |x: f64| px(x - x0);
    let ty = |y: f64| px(y1 - y);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = px(width),
        h = px(height)
    );
    out.push_str("<style>.strip{stroke:#444;stroke-width:1}.disk{fill:#4a90d9;fill-opacity:0.15;stroke:#4a90d9;stroke-width:1}.point{fill:#222}.source{fill:#d0021b}</style>\n");
    if let Some(w) = instance.width {
        for y in [0.0, w] {
            let _ = writeln!(
                out,
                "<line class=\"strip\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                tx(x0),
                ty(y),
                tx(x1),
                ty(y)
            );
        }
    }
    if let Some(active) = active {
        for &i in active.indices().iter().filter(|&&i| i < pts.len()) {
            let _ = writeln!(
                out,
                "<circle class=\"disk\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
                tx(pts[i].x),
                ty(pts[i].y),
                px(r)
            );
        }
    }
    for (i, p) in pts.iter().enumerate() {
        let class = if i == instance.source { "point source" } else { "point" };
        let _ = writeln!(
            out,
            "<circle class=\"{class}\" id=\"p{i}\" cx=\"{}\" cy=\"{}\" r=\"{MARKER_RADIUS:.3}\"/>",
            tx(p.x),
            ty(p.y)
        );
    }
    out.push_str("</svg>\n");
    out
}
