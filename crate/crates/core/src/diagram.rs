//! Geodesic pictures of `F_N` in the upper half plane, as SVG, and a JSON-lines edge list.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{cmp_edges, edges_in, Edge, Modulus};
use crate::path::Path;

pub const UNIT_PX: i64 = 600;
const MARGIN_PX: i64 = 20;

#[derive(Clone, Debug)]
pub struct PlotRequest {
    pub modulus: Modulus,
    pub lo: BigRational,
    pub hi: BigRational,
    pub qmax: BigInt,
    pub highlight: Vec<Path>,
}

/// Fixed point with three decimals, rounded half away from zero.
fn fixed(r: &BigRational) -> String {
    let milli = (r * BigRational::from_integer(1000.into())).round().to_integer();
    let sign = if milli.is_negative() { "-" } else { "" };
    let (int, frac) = milli.abs().div_rem(&BigInt::from(1000));
    format!("{sign}{int}.{frac:03}")
}

struct Frame {
    lo: BigRational,
    scale: BigRational,
    base: BigRational,
}

impl Frame {
    fn of(req: &PlotRequest) -> Frame {
        let scale = BigRational::from_integer(UNIT_PX.into());
        let margin = BigRational::from_integer(MARGIN_PX.into());
        let span = (&req.hi - &req.lo) * &scale;
        let base = span / BigRational::from_integer(2.into()) + margin * BigRational::from_integer(2.into());
        Frame { lo: req.lo.clone(), scale, base }
    }

    fn x(&self, v: &BigRational) -> BigRational {
        (v - &self.lo) * &self.scale + BigRational::from_integer(MARGIN_PX.into())
    }
}

fn draw(out: &mut String, e: &Edge, class: &str, f: &Frame) {
    let a = e.lo().to_ratio().unwrap();
    if e.is_vertical() {
        let x = fixed(&f.x(&a));
        let _ = writeln!(out, r#"<line class="{class}" x1="{x}" y1="{}" x2="{x}" y2="0.000"/>"#, fixed(&f.base));
        return;
    }
    let b = e.hi().to_ratio().unwrap();
    let r = fixed(&((&b - &a) * &f.scale / BigRational::from_integer(2.into())));
    let y = fixed(&f.base);
    let _ = writeln!(
        out,
        r#"<path class="{class}" d="M {} {y} A {r} {r} 0 0 1 {} {y}"/>"#,
        fixed(&f.x(&a)),
        fixed(&f.x(&b)),
    );
}

fn in_window(e: &Edge, lo: &BigRational, hi: &BigRational) -> bool {
    [e.lo(), e.hi()].iter().all(|v| v.to_ratio().is_none_or(|r| &r >= lo && &r <= hi))
}

/// The edges of each highlighted path that lie in the window, sorted.
fn path_edges(p: &Path, req: &PlotRequest) -> Result<Vec<Edge>> {
    if p.modulus() != &req.modulus {
        return Err(Error::Precondition(format!("path {p} is not in F_{}", req.modulus)));
    }
    p.check()?;
    let mut out = Vec::new();
    for w in p.vertices().windows(2) {
        let e = Edge::between(w[0].clone(), w[1].clone())?;
        if in_window(&e, &req.lo, &req.hi) {
            out.push(e);
        }
    }
    out.sort_by(cmp_edges);
    Ok(out)
}

/// A deterministic picture: the real axis, a semicircle for each finite edge, a vertical
/// ray for each edge to infinity, and each highlighted path in class `path<k>` on top.
pub fn plot_svg(req: &PlotRequest) -> Result<String> {
    if req.lo >= req.hi {
        return Err(Error::Precondition(format!("empty interval [{}, {}]", req.lo, req.hi)));
    }
    let frame = Frame::of(req);
    let margin = BigRational::from_integer(MARGIN_PX.into());
    let span = (&req.hi - &req.lo) * &frame.scale;
    let width = fixed(&(span + &margin * BigRational::from_integer(2.into())));
    let height = fixed(&(&frame.base + &margin));

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        out,
        "<title>F_{} on [{}, {}], denominators up to {}</title>",
        req.modulus, req.lo, req.hi, req.qmax
    );
    out.push_str(concat!(
        "<style>path,line{fill:none;stroke-width:1}",
        ".axis{stroke:#000}.edge{stroke:#888}",
        ".path0{stroke:#d22;stroke-width:2.5}.path1{stroke:#2a2;stroke-width:2.5}",
        ".path2{stroke:#22d;stroke-width:2.5}.path3{stroke:#c80;stroke-width:2.5}</style>\n",
    ));
    let y = fixed(&frame.base);
    let _ = writeln!(out, r#"<line class="axis" x1="0.000" y1="{y}" x2="{width}" y2="{y}"/>"#);
    for e in edges_in(&req.modulus, &req.lo, &req.hi, &req.qmax)? {
        draw(&mut out, &e, "edge", &frame);
    }
    for (k, p) in req.highlight.iter().enumerate() {
        for e in path_edges(p, req)? {
            draw(&mut out, &e, &format!("path{k}"), &frame);
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// One `{"n":N,"from":"p/q","to":"r/s"}` object per line, in edge order.
pub fn edges_jsonl(m: &Modulus, edges: &[Edge]) -> String {
    let mut out = String::new();
    for e in edges {
        let line = json!({"n": m.n(), "from": e.lo().to_string(), "to": e.hi().to_string()});
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

/// Whether the text contains the arc or ray drawn for `e`.
pub fn svg_has_edge(svg: &str, req: &PlotRequest, e: &Edge) -> bool {
    let mut probe = String::new();
    draw(&mut probe, e, "", &Frame::of(req));
    let shape = probe.trim_end().trim_end_matches("/>");
    let body = &shape[shape.find("\" ").map_or(0, |i| i + 2)..];
    !body.is_empty() && svg.contains(body)
}
