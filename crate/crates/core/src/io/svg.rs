//! SVG outlines of planar bodies (a developer aid for eyeballing results).

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::body::BodyRep;
use crate::geometry::hull::PolytopeGeometry;
use crate::linalg::Coords;

const SMOOTH_OUTLINE_POINTS: usize = 512;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Boundary points in counter-clockwise order: hull vertices for polytope
/// expressions, support points in equally spaced directions otherwise.
pub fn outline(body: &BodyRep) -> Result<Vec<Coords>> {
    if body.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: body.dim() });
    }
    if let Some(v) = body.polytope_vertices() {
        return Ok(PolytopeGeometry::new(&v)?.vertices);
    }
    Ok((0..SMOOTH_OUTLINE_POINTS)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / SMOOTH_OUTLINE_POINTS as f64;
            body.support_point(&[t.cos(), t.sin()])
        })
        .collect())
}

pub fn render_svg_2d(bodies: &[BodyRep]) -> Result<String> {
    let outlines: Vec<Vec<Coords>> = bodies.iter().map(outline).collect::<Result<_>>()?;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in outlines.iter().flatten() {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    if outlines.iter().all(|o| o.is_empty()) {
        lo = [-1.0, -1.0];
        hi = [1.0, 1.0];
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let pad = 0.05 * span;
    let (x0, y0, w, h) = (lo[0] - pad, -(hi[1] + pad), hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
    let stroke = span / 300.0;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0} {y0} {w} {h}" width="600" height="{}">"#,
        (600.0 * h / w).round()
    )
    .unwrap();
    for (i, pts) in outlines.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (k, p) in pts.iter().enumerate() {
            // flip y so that the picture has the usual orientation
            write!(d, "{}{} {} ", if k == 0 { "M" } else { "L" }, p[0], -p[1]).unwrap();
        }
        d.push('Z');
        writeln!(
            s,
            r#"  <path d="{d}" fill="none" stroke="{}" stroke-width="{stroke}"/>"#,
            COLORS[i % COLORS.len()]
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn plot_svg_2d(bodies: &[BodyRep], path: &Path) -> Result<()> {
    let svg = render_svg_2d(bodies)?;
    super::write_atomic(path, svg.as_bytes())
}
