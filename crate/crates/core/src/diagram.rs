//! Scenes for the two classical tangent/area figures and a small SVG writer.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::curve::{CurveError, Monotonicity, PlaneCurve};
use crate::quadrature::{self, barrow_subtangent, QuadratrixCurve, QuadratureError};

/// Samples per curve polyline.
const CURVE_SAMPLES: usize = 129;
const MIN_WIDTH_PX: u32 = 64;
/// Label offset from its marker, in pixels, up and to the right.
const LABEL_OFFSET_PX: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagramError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("step Δ must be positive, got {0}")]
    DegenerateStep(f64),
    #[error("geometric check failed: {0}")]
    Geometry(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    Axis,
    Curve,
    Quadratrix,
    Tangent,
    Construction,
}

impl Style {
    fn name(self) -> &'static str {
        match self {
            Style::Axis => "axis",
            Style::Curve => "curve",
            Style::Quadratrix => "quadratrix",
            Style::Tangent => "tangent",
            Style::Construction => "construction",
        }
    }

    fn stroke(self) -> (&'static str, Option<&'static str>) {
        match self {
            Style::Axis => ("#000000", None),
            Style::Curve => ("#1f4e9c", None),
            Style::Quadratrix => ("#9c1f1f", None),
            Style::Tangent => ("#2a7a2a", Some("6 3")),
            Style::Construction => ("#777777", Some("2 2")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Primitive {
    Polyline { points: Vec<Point>, style: Style },
    Segment { p: Point, q: Point, style: Style },
    Marker { p: Point, label: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Canonical,
    /// Rotated by 180° about the origin.
    Rotated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Scene {
    pub primitives: Vec<Primitive>,
    pub metadata: BTreeMap<String, String>,
    pub orientation: Orientation,
}

impl Scene {
    pub fn new() -> Self {
        Scene::default()
    }

    pub fn polyline(&mut self, points: Vec<Point>, style: Style) {
        self.primitives.push(Primitive::Polyline { points, style });
    }

    pub fn segment(&mut self, p: Point, q: Point, style: Style) {
        self.primitives.push(Primitive::Segment { p, q, style });
    }

    pub fn marker(&mut self, p: Point, label: impl Into<String>) {
        self.primitives.push(Primitive::Marker { p, label: label.into() });
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    pub fn rotated(mut self) -> Self {
        self.orientation = Orientation::Rotated;
        self
    }

    /// Position of the first marker with this label.
    pub fn find_marker(&self, label: &str) -> Option<Point> {
        self.primitives.iter().find_map(|p| match p {
            Primitive::Marker { p, label: l } if l == label => Some(*p),
            _ => None,
        })
    }

    fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.primitives.iter().flat_map(|p| match p {
            Primitive::Polyline { points, .. } => points.clone(),
            Primitive::Segment { p, q, .. } => vec![*p, *q],
            Primitive::Marker { p, .. } => vec![*p],
        })
    }

    /// Smallest box holding every primitive; `None` for an empty scene.
    pub fn bbox(&self) -> Option<BBox> {
        self.points().fold(None, |b, p| {
            Some(match b {
                None => BBox { min: p, max: p },
                Some(BBox { min, max }) => BBox {
                    min: Point::new(min.x.min(p.x), min.y.min(p.y)),
                    max: Point::new(max.x.max(p.x), max.y.max(p.y)),
                },
            })
        })
    }
}

fn sample(c: &PlaneCurve) -> Result<Vec<Point>, CurveError> {
    let (lo, hi) = c.domain();
    (0..CURVE_SAMPLES)
        .map(|i| {
            let x = if i == CURVE_SAMPLES - 1 {
                hi
            } else {
                lo + (hi - lo) * (i as f64 / (CURVE_SAMPLES - 1) as f64)
            };
            Ok(Point::new(x, c.eval(x)?))
        })
        .collect()
}

fn table(y: &PlaneCurve, scale: f64) -> Result<QuadratrixCurve, QuadratureError> {
    let (lo, hi) = y.domain();
    quadrature::quadratrix(y, scale, CURVE_SAMPLES, 1e-10 * (hi - lo).max(1.0))
}

fn quadratrix_points(q: &QuadratrixCurve) -> Vec<Point> {
    q.nodes().map(|n| Point::new(n.x, n.mid)).collect()
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

/// The area-curve figure: tangent at `F = (x0, z(x0))` meeting the axis at
/// `T`, and the triangle `I, L, K` at `x0 − Δ`.
pub fn barrow_figure(y: &PlaneCurve, r: f64, x0: f64, delta: f64) -> Result<Scene, DiagramError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(DiagramError::DegenerateStep(delta));
    }
    quadrature::verify_prop11(y, r, x0, &[x0])?;
    let (lo, hi) = y.domain();
    if x0 - delta < lo {
        return Err(CurveError::OutOfDomain { x: x0 - delta, lo, hi }.into());
    }
    let convex = !matches!(y.monotonicity(lo, hi, 257)?, Monotonicity::Decreasing);
    let q = table(y, r)?;
    let y0 = y.eval(x0)?;
    let z0 = q.z_at(x0)?;
    let t = barrow_subtangent(&q, x0)?;
    let tp = Point::new(x0 - t, 0.0);
    let d = Point::new(x0, 0.0);
    let e = Point::new(x0, y0);
    let f = Point::new(x0, z0.mid);
    let zi = q.z_at(x0 - delta)?;
    let i = Point::new(x0 - delta, zi.mid);
    let l = Point::new(x0, zi.mid);
    let lk = (z0.mid - zi.mid) * r / y0;
    let k = Point::new(x0 - lk, zi.mid);
    let li = delta;

    let scale = (hi - lo).max(y0.abs()).max(z0.mid.abs()).max(t.abs());
    let tol = z0.radius + zi.radius + 1e-9 * scale;
    let ok = if convex {
        lk <= li + tol * r / y0
    } else {
        lk + tol * r / y0 >= li
    };
    if !ok {
        return Err(DiagramError::Geometry(format!("LK = {lk} vs LI = {li}")));
    }
    let (u, v) = (Point::new(f.x - tp.x, f.y - tp.y), Point::new(k.x - tp.x, k.y - tp.y));
    let cross = (u.x * v.y - u.y * v.x) / u.x.hypot(u.y);
    if cross.abs() > 1e-9 * scale {
        return Err(DiagramError::Geometry(format!("T, F, K not collinear: {cross}")));
    }

    let mut s = Scene::new();
    s.segment(
        Point::new(lo.min(tp.x), 0.0),
        Point::new(hi.max(tp.x), 0.0),
        Style::Axis,
    );
    s.polyline(sample(y)?, Style::Curve);
    s.polyline(quadratrix_points(&q), Style::Quadratrix);
    let far = (x0 + delta).min(hi);
    s.segment(tp, Point::new(far, z0.mid + y0 / r * (far - x0)), Style::Tangent);
    s.segment(d, Point::new(x0, y0.max(z0.mid)), Style::Construction);
    s.segment(i, l, Style::Construction);
    s.segment(Point::new(i.x, 0.0), i, Style::Construction);
    for (p, name) in [(d, "D"), (e, "E"), (f, "F"), (tp, "T"), (i, "I"), (l, "L"), (k, "K")] {
        s.marker(p, name);
    }
    s.note("figure", "barrow");
    s.note("subtangent", fmt_num(t));
    s.note("LK", fmt_num(lk));
    s.note("LI", fmt_num(li));
    s.note("collinearity_residual", fmt_num(cross));
    if (lk - li).abs() <= tol * r / y0 {
        s.note("boundary", "tangent coincides with the area curve; K lies on it");
    }
    Ok(s)
}

/// The tangent figure with both the tangent point `C̄` and the curve point
/// `(C)` on the ordinate through `x0 + Δ`.
pub fn leibniz_figure(y: &PlaneCurve, a: f64, x0: f64, delta: f64) -> Result<Scene, DiagramError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(DiagramError::DegenerateStep(delta));
    }
    quadrature::verify_leibniz_tangency(y, a, x0, delta)?;
    let (lo, hi) = y.domain();
    let q = table(y, a)?;
    let y0 = y.eval(x0)?;
    let y1 = y.eval(x0 + delta)?;
    let z0 = q.z_at(x0)?;
    let z1 = q.z_at(x0 + delta)?;
    let x1 = x0 + delta;
    let c = Point::new(x0, z0.mid);
    let e = Point::new(x1, z0.mid);
    let c_bar = Point::new(x1, z0.mid + delta * y0 / a);
    let c_paren = Point::new(x1, z1.mid);
    let tp = Point::new(lo, z0.mid - (x0 - lo) * y0 / a);

    let tol = z0.radius + z1.radius + 1e-9 * (hi - lo).max(y0.abs()).max(z1.mid.abs());
    let gap = c_paren.y - c_bar.y;
    let boundary = gap.abs() <= tol;
    if !boundary && gap < 0.0 {
        return Err(DiagramError::Geometry(format!("C̄ above (C) by {}", -gap)));
    }

    let mut s = Scene::new();
    s.segment(Point::new(lo, 0.0), Point::new(hi, 0.0), Style::Axis);
    s.segment(
        Point::new(lo, tp.y.min(0.0)),
        Point::new(lo, c_paren.y.max(c_bar.y).max(y1)),
        Style::Axis,
    );
    s.polyline(sample(y)?, Style::Curve);
    s.polyline(quadratrix_points(&q), Style::Quadratrix);
    s.segment(tp, c_bar, Style::Tangent);
    s.segment(c, e, Style::Construction);
    s.segment(
        Point::new(x1, 0.0),
        Point::new(x1, c_paren.y.max(c_bar.y)),
        Style::Construction,
    );
    s.segment(Point::new(x0, 0.0), c, Style::Construction);
    s.marker(Point::new(x0, y0), "H");
    s.marker(Point::new(x1, y1), "(H)");
    s.marker(c, "C");
    s.marker(e, "E");
    s.marker(tp, "T");
    if boundary {
        s.marker(c_bar, "C̄ = (C)");
        s.note("boundary", "tangent point and curve point coincide");
    } else {
        s.marker(c_bar, "C̄");
        s.marker(c_paren, "(C)");
    }
    s.note("figure", "leibniz");
    s.note("EC_bar", fmt_num(c_bar.y - e.y));
    s.note("E(C)", fmt_num(c_paren.y - e.y));
    s.note("omitted", "G, GL: placement not determined by the construction");
    Ok(s)
}

/// Six significant digits, fixed notation, no trailing zeros.
pub fn fmt6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = 5 - mag;
    let s = if decimals >= 0 {
        format!("{:.*}", decimals as usize, v)
    } else {
        let unit = 10f64.powi(-decimals);
        format!("{:.0}", (v / unit).round() * unit)
    };
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Render as a standalone SVG 1.1 document `width_px` wide (at least 64).
/// Output depends only on the scene and width.
pub fn render_svg(scene: &Scene, width_px: u32) -> Vec<u8> {
    let width = width_px.max(MIN_WIDTH_PX);
    let rot = |p: Point| match scene.orientation {
        Orientation::Canonical => p,
        Orientation::Rotated => Point::new(-p.x, -p.y),
    };
    let bbox = scene.bbox().map(|b| {
        let (p, q) = (rot(b.min), rot(b.max));
        BBox {
            min: Point::new(p.x.min(q.x), p.y.min(q.y)),
            max: Point::new(p.x.max(q.x), p.y.max(q.y)),
        }
    });
    let b = bbox.unwrap_or(BBox {
        min: Point::new(0.0, 0.0),
        max: Point::new(1.0, 1.0),
    });
    let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
    let (w, h) = (span(b.min.x, b.max.x), span(b.min.y, b.max.y));
    let (px, py) = (0.05 * w, 0.05 * h);
    let (vx, vy, vw, vh) = (b.min.x - px, -(b.min.y + h) - py, w + 2.0 * px, h + 2.0 * py);
    let unit = vw / f64::from(width);
    let height = (f64::from(width) * vh / vw).round().max(1.0);
    // screen coordinates: y grows downward
    let sx = |p: Point| {
        let p = rot(p);
        format!("{},{}", fmt6(p.x), fmt6(-p.y))
    };

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        height,
        fmt6(vx),
        fmt6(vy),
        fmt6(vw),
        fmt6(vh)
    );
    if !scene.metadata.is_empty() {
        let meta: Vec<String> = scene.metadata.iter().map(|(k, v)| format!("{k}: {v}")).collect();
        let _ = writeln!(out, "<desc>{}</desc>", escape(&meta.join("; ")));
    }
    let stroke_w = fmt6(1.5 * unit);
    let _ = writeln!(
        out,
        "<g fill=\"none\" stroke-width=\"{stroke_w}\" stroke-linecap=\"round\">"
    );
    for prim in &scene.primitives {
        let (style, body) = match prim {
            Primitive::Polyline { points, style } => {
                let pts: Vec<String> = points.iter().map(|&p| sx(p)).collect();
                (*style, format!("<polyline points=\"{}\"", pts.join(" ")))
            }
            Primitive::Segment { p, q, style } => {
                let (p, q) = (rot(*p), rot(*q));
                (
                    *style,
                    format!(
                        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"",
                        fmt6(p.x),
                        fmt6(-p.y),
                        fmt6(q.x),
                        fmt6(-q.y)
                    ),
                )
            }
            Primitive::Marker { .. } => continue,
        };
        let (color, dash) = style.stroke();
        let dash = dash.map_or(String::new(), |d| {
            let parts: Vec<String> = d
                .split(' ')
                .map(|n| fmt6(n.parse::<f64>().unwrap_or(1.0) * unit))
                .collect();
            format!(" stroke-dasharray=\"{}\"", parts.join(" "))
        });
        let _ = writeln!(out, "{body} class=\"{}\" stroke=\"{color}\"{dash}/>", style.name());
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        "<g font-family=\"serif\" font-size=\"{}\" fill=\"#000000\">",
        fmt6(12.0 * unit)
    );
    for prim in &scene.primitives {
        if let Primitive::Marker { p, label } = prim {
            let p = rot(*p);
            let _ = writeln!(
                out,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/><text x=\"{}\" y=\"{}\">{}</text>",
                fmt6(p.x),
                fmt6(-p.y),
                fmt6(2.5 * unit),
                fmt6(p.x + LABEL_OFFSET_PX * unit),
                fmt6(-p.y - LABEL_OFFSET_PX * unit),
                escape(label)
            );
        }
    }
    out.push_str("</g>\n</svg>\n");
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(t: &str, lo: f64, hi: f64) -> PlaneCurve {
        PlaneCurve::parse(t, lo, hi).unwrap()
    }

    fn parse_svg(bytes: &[u8]) -> roxmltree::Document<'_> {
        roxmltree::Document::parse(std::str::from_utf8(bytes).unwrap()).unwrap()
    }

    #[test]
    fn barrow_identity_tangent_foot() {
        let s = barrow_figure(&curve("x", 0.0, 2.0), 1.0, 1.0, 0.25).unwrap();
        let t = s.find_marker("T").unwrap();
        assert!((t.x - 0.5).abs() < 1e-9 && t.y == 0.0);
        let k = s.find_marker("K").unwrap();
        let i = s.find_marker("I").unwrap();
        assert!(k.x > i.x, "K lies right of I: LK < LI");
    }

    #[test]
    fn barrow_constant_is_boundary() {
        let s = barrow_figure(&curve("1", 0.0, 2.0), 1.0, 1.0, 0.25).unwrap();
        assert!(s.metadata.contains_key("boundary"));
        let (k, i) = (s.find_marker("K").unwrap(), s.find_marker("I").unwrap());
        assert!((k.x - i.x).abs() < 1e-9);
    }

    #[test]
    fn barrow_errors() {
        let y = curve("x", 0.0, 2.0);
        assert!(matches!(barrow_figure(&y, 1.0, 0.1, 0.25), Err(DiagramError::Curve(_))));
        assert!(matches!(
            barrow_figure(&y, 1.0, 3.0, 0.25),
            Err(DiagramError::Quadrature(_))
        ));
        assert!(matches!(
            barrow_figure(&y, 1.0, 1.0, 0.0),
            Err(DiagramError::DegenerateStep(_))
        ));
    }

    #[test]
    fn leibniz_identity_offsets() {
        let s = leibniz_figure(&curve("x", 0.0, 2.0), 1.0, 1.0, 0.5).unwrap();
        let e = s.find_marker("E").unwrap();
        let cb = s.find_marker("C̄").unwrap();
        let cp = s.find_marker("(C)").unwrap();
        assert!((cb.y - e.y - 0.5).abs() < 1e-12);
        assert!((cp.y - e.y - 0.625).abs() < 1e-9);
        assert!(cb.y < cp.y);
    }

    #[test]
    fn leibniz_constant_markers_coincide() {
        let s = leibniz_figure(&curve("2", 0.0, 2.0), 1.0, 0.5, 1.0).unwrap();
        assert!(s.find_marker("C̄ = (C)").is_some());
        assert!(s.find_marker("(C)").is_none());
        assert!(matches!(
            leibniz_figure(&curve("x", 0.0, 2.0), 1.0, 1.0, 0.0),
            Err(DiagramError::DegenerateStep(_))
        ));
    }

    #[test]
    fn svg_is_well_formed_and_deterministic() {
        let s = leibniz_figure(&curve("x^2 + 1", 0.0, 2.0), 1.5, 0.5, 0.75).unwrap();
        let a = render_svg(&s, 640);
        let b = render_svg(&s.clone(), 640);
        assert_eq!(a, b);
        let doc = parse_svg(&a);
        let root = doc.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        assert_eq!(root.attribute("version"), Some("1.1"));
        assert!(root.descendants().filter(|n| n.has_tag_name("text")).count() >= 6);
        let rotated = render_svg(&s.clone().rotated(), 640);
        assert_ne!(rotated, a);
        parse_svg(&rotated);
    }

    #[test]
    fn empty_scene_renders() {
        let svg = render_svg(&Scene::new(), 10);
        let doc = parse_svg(&svg);
        assert_eq!(doc.root_element().attribute("width"), Some("64"));
        assert_eq!(doc.root_element().children().filter(|n| n.is_element()).count(), 2);
    }

    #[test]
    fn viewbox_pads_five_percent() {
        let mut s = Scene::new();
        s.segment(Point::new(0.0, 0.0), Point::new(10.0, 2.0), Style::Axis);
        let svg = render_svg(&s, 100);
        let doc = parse_svg(&svg);
        assert_eq!(doc.root_element().attribute("viewBox"), Some("-0.5 -2.1 11 2.2"));
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt6(1.0), "1");
        assert_eq!(fmt6(std::f64::consts::PI), "3.14159");
        assert_eq!(fmt6(-0.000123456789), "-0.000123457");
        assert_eq!(fmt6(123456789.0), "123457000");
        assert_eq!(fmt6(9.9999996), "10");
        assert_eq!(fmt6(-1e-300 * 0.0), "0");
    }

    #[test]
    fn labels_are_escaped() {
        let mut s = Scene::new();
        s.marker(Point::new(0.0, 0.0), "a<b & c");
        let svg = render_svg(&s, 64);
        let doc = parse_svg(&svg);
        let text = doc.descendants().find(|n| n.has_tag_name("text")).unwrap();
        assert_eq!(text.text(), Some("a<b & c"));
    }
}
