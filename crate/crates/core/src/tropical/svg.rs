use std::fmt::Write as _;

use num_traits::ToPrimitive;

use super::arrangement::LineArrangement;
use super::curve::{EdgeEnd, Point, TropicalCurve};
use crate::sorting::SortingDiagram;

const SCALE: f64 = 40.0;
const MARGIN: f64 = 1.5;

fn xy(p: &Point) -> (f64, f64) {
    (p.0.to_f64().unwrap_or(0.0), p.1.to_f64().unwrap_or(0.0))
}

/// SVG of the curve over its arrangement; bounded edges solid, legs and the
/// outgoing rays clipped to the viewport.
pub fn render_svg(d: &SortingDiagram, arr: &LineArrangement, h: &TropicalCurve) -> String {
    let mut pts: Vec<(f64, f64)> = h
        .components
        .iter()
        .flat_map(|c| c.vertices.iter().filter_map(|v| v.point.as_ref().map(xy)))
        .collect();
    for l in h.legs.iter().filter_map(|l| l.line).map(|i| arr.line(i)) {
        pts.push(xy(&l.anchor()));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if pts.is_empty() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    x0 -= MARGIN;
    y0 -= MARGIN;
    x1 += MARGIN;
    y1 += MARGIN;
    let width = (x1 - x0) * SCALE;
    let height = (y1 - y0) * SCALE;
    let tx = |x: f64| (x - x0) * SCALE;
    let ty = |y: f64| (y1 - y) * SCALE;
    // distance along a direction until the point leaves the box
    let clip = |p: (f64, f64), dir: (f64, f64)| -> (f64, f64) {
        let mut t = f64::MAX;
        for (c, v, lo, hi) in [(p.0, dir.0, x0, x1), (p.1, dir.1, y0, y1)] {
            if v > 0.0 {
                t = t.min((hi - c) / v);
            } else if v < 0.0 {
                t = t.min((lo - c) / v);
            }
        }
        (p.0 + t * dir.0, p.1 + t * dir.1)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );
    for l in h.legs.iter().filter_map(|l| l.line).map(|i| arr.line(i)) {
        let (a, b) = if l.vertical {
            let x = l.offset.to_f64().unwrap_or(0.0);
            ((x, y0), (x, y1))
        } else {
            let y = l.offset.to_f64().unwrap_or(0.0);
            ((x0, y), (x1, y))
        };
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#cccccc" stroke-dasharray="4 3"/>"##,
            tx(a.0),
            ty(a.1),
            tx(b.0),
            ty(b.1)
        );
        let (lx, ly) = if l.vertical {
            (tx(a.0) + 3.0, 12.0)
        } else {
            (3.0, ty(a.1) - 3.0)
        };
        let _ = writeln!(
            out,
            r##"<text x="{lx:.1}" y="{ly:.1}" font-size="10" fill="#666666">{}</text>"##,
            l.label()
        );
    }
    for c in h.components.iter().filter(|c| c.is_embedded()) {
        let out_start = c.out_start().map(xy);
        let at = |v: usize| c.vertices[v].point.as_ref().map(xy).unwrap_or_default();
        for e in &c.edges {
            let dir = (e.direction.0 as f64, e.direction.1 as f64);
            let (a, b) = match (e.tail, e.head) {
                (EdgeEnd::Vertex(t), EdgeEnd::Vertex(h)) => (at(t), at(h)),
                (EdgeEnd::Vertex(t), EdgeEnd::Infinity) => {
                    let p = at(t);
                    (p, clip(p, dir))
                }
                (EdgeEnd::Infinity, EdgeEnd::Vertex(h)) => {
                    let p = at(h);
                    (clip(p, (-dir.0, -dir.1)), p)
                }
                (EdgeEnd::Infinity, EdgeEnd::Infinity) => {
                    let anchor = out_start
                        .or_else(|| c.legs[0].line.map(|i| xy(&arr.line(i).anchor())))
                        .unwrap_or_default();
                    (clip(anchor, (-dir.0, -dir.1)), clip(anchor, dir))
                }
            };
            let _ = writeln!(
                out,
                r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#1f4e9c" stroke-width="{}"/>"##,
                tx(a.0),
                ty(a.1),
                tx(b.0),
                ty(b.1),
                1 + e.weight
            );
            let (mx, my) = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
            let _ = writeln!(
                out,
                r##"<text x="{:.1}" y="{:.1}" font-size="9" fill="#1f4e9c">{}</text>"##,
                tx(mx) + 3.0,
                ty(my) - 3.0,
                e.weight
            );
        }
        for v in &c.vertices {
            let (x, y) = v.point.as_ref().map(xy).unwrap_or_default();
            let _ = writeln!(
                out,
                r##"<circle cx="{:.1}" cy="{:.1}" r="3" fill="#c0392b"><title>{} mult_Q={} mult={}</title></circle>"##,
                tx(x),
                ty(y),
                d.node(v.op).op,
                v.mult_q,
                v.mult_std
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Text dump: vertices with positions and multiplicities, then edges.
pub fn curve_dump(d: &SortingDiagram, h: &TropicalCurve) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "curve {} d_out={} mult_Q={} mult={}",
        h.ops
            .iter()
            .map(|&i| d.node(i).op.d.to_string())
            .collect::<Vec<_>>()
            .join(" | "),
        h.d_out,
        h.mult_q,
        h.mult_std
    );
    for (ci, c) in h.components.iter().enumerate() {
        for (vi, v) in c.vertices.iter().enumerate() {
            let pos = match &v.point {
                Some(p) => format!("({}, {})", p.0, p.1),
                None => "-".to_string(),
            };
            let _ = writeln!(
                out,
                "v{ci}.{vi}\t{pos}\t{}\tmult_Q={}\tmult={}",
                d.node(v.op).op.d,
                v.mult_q,
                v.mult_std
            );
        }
        for e in &c.edges {
            let end = |x: EdgeEnd| match x {
                EdgeEnd::Vertex(v) => format!("v{ci}.{v}"),
                EdgeEnd::Infinity => "inf".to_string(),
            };
            let _ = writeln!(
                out,
                "e\t{}\t{} -> {}\tw={}\tdir=({},{})",
                d.node(e.op).op.d,
                end(e.tail),
                end(e.head),
                e.weight,
                e.direction.0,
                e.direction.1
            );
        }
    }
    out
}
