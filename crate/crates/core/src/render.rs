//! SVG pictures of the uplift configuration.
//!
//! Geometry is computed in the scalar type and only converted to `f64` for
//! drawing. Coordinates in the document are plane units; a single group
//! transform maps them to pixels with `Y` pointing up.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fricke::FrickeParams;
use crate::identity::{node_interval, special_intervals, Ambient};
use crate::moebius::{apex_of_pair, hline_through, Mat2, Point};
use crate::scalar::Scalar;
use crate::tree::{enumerate_tree, Budget, TreeNode};

pub const GENERATOR: &str = concat!("mcshane-render ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Layers {
    pub uplift: bool,
    pub isometric: bool,
    pub intervals: bool,
    pub punctures: bool,
    pub hexagon: bool,
}

impl Default for Layers {
    fn default() -> Self {
        Layers { uplift: true, isometric: true, intervals: true, punctures: true, hexagon: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    /// `None` frames the ambient interval with height `a`.
    pub window: Option<Window>,
    pub layers: Layers,
    pub depth: usize,
    pub width_px: f64,
    /// Largest distance between an arc and its polyline, in pixels.
    pub sagitta_px: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        SceneSpec { window: None, layers: Layers::default(), depth: 2, width_px: 800.0, sagitta_px: 0.5 }
    }
}

impl SceneSpec {
    /// The explicit window, or the default frame around the ambient interval.
    pub fn window_for<S: Scalar>(&self, params: &FrickeParams<S>, prec: u32) -> Result<Window> {
        let w = match self.window {
            Some(w) => w,
            None => {
                let amb = Ambient::new(params);
                let a = params.a.to_real(prec).to_f64();
                Window { x_min: amb.lo(prec).to_f64() - 0.25 * a, x_max: amb.hi(prec).to_f64() + 0.25 * a, y_min: 0.0, y_max: a }
            }
        };
        let finite = [w.x_min, w.x_max, w.y_min, w.y_max].iter().all(|v| v.is_finite());
        if !finite || w.x_max <= w.x_min || w.y_max <= w.y_min || w.y_min < 0.0 || self.width_px <= 0.0 || self.sagitta_px <= 0.0 {
            return Err(Error::EmptyScene);
        }
        Ok(w)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layer {
    UpperBoundary,
    LowerBoundary,
    Isometric,
    Horocycle,
    Interval,
    Puncture,
    Hexagon,
}

impl Layer {
    fn class(self) -> &'static str {
        match self {
            Layer::UpperBoundary => "upper",
            Layer::LowerBoundary => "lower",
            Layer::Isometric => "iso",
            Layer::Horocycle => "horocycle",
            Layer::Interval => "interval",
            Layer::Puncture => "puncture",
            Layer::Hexagon => "hexagon",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polyline {
    pub layer: Layer,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Marker {
    pub layer: Layer,
    pub x: f64,
    pub y: f64,
    pub label: String,
}

/// Everything drawn, in plane coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scene {
    pub window: Window,
    /// Pixels per plane unit.
    pub scale: f64,
    pub lines: Vec<Polyline>,
    pub markers: Vec<Marker>,
}

// Bisects [t0, t1] until every chord is within tol of the curve at its midpoint.
fn flatten(f: &dyn Fn(f64) -> (f64, f64), t0: f64, t1: f64, tol: f64) -> Vec<(f64, f64)> {
    fn go(f: &dyn Fn(f64) -> (f64, f64), t0: f64, p0: (f64, f64), t1: f64, p1: (f64, f64), tol: f64, depth: u32, out: &mut Vec<(f64, f64)>) {
        let tm = 0.5 * (t0 + t1);
        let pm = f(tm);
        let (dx, dy) = (p1.0 - p0.0, p1.1 - p0.1);
        let len = dx.hypot(dy);
        let dev = if len == 0.0 { (pm.0 - p0.0).hypot(pm.1 - p0.1) } else { ((pm.0 - p0.0) * dy - (pm.1 - p0.1) * dx).abs() / len };
        if depth < 20 && (dev > tol || depth < 2) {
            go(f, t0, p0, tm, pm, tol, depth + 1, out);
            go(f, tm, pm, t1, p1, tol, depth + 1, out);
        } else {
            out.push(p1);
        }
    }
    let p0 = f(t0);
    let mut out = vec![p0];
    go(f, t0, p0, t1, f(t1), tol, 0, &mut out);
    out
}

struct Builder {
    w: Window,
    tol: f64,
    lines: Vec<Polyline>,
    markers: Vec<Marker>,
}

impl Builder {
    fn curve(&mut self, layer: Layer, f: &dyn Fn(f64) -> (f64, f64), t0: f64, t1: f64) {
        if t1 > t0 {
            self.lines.push(Polyline { layer, points: flatten(f, t0, t1, self.tol) });
        }
    }

    // (X - c)² - Y² = ∓k: the two uplift boundaries of an order-two element.
    fn uplift(&mut self, c: f64, k: f64) {
        let s = k.sqrt();
        let w = self.w;
        let t_lo = ((w.x_min - c) / s).asinh();
        let t_hi = ((w.x_max - c) / s).asinh();
        self.curve(Layer::UpperBoundary, &|t| (c + s * t.sinh(), s * t.cosh()), t_lo, t_hi);
        let t_top = (w.y_max / s).asinh();
        self.curve(Layer::LowerBoundary, &|t| (c + s * t.cosh(), s * t.sinh()), 0.0, t_top);
        self.curve(Layer::LowerBoundary, &|t| (c - s * t.cosh(), s * t.sinh()), 0.0, t_top);
    }

    fn semicircle(&mut self, layer: Layer, c: f64, r: f64, from: f64, to: f64) {
        self.curve(layer, &|t| (c + r * t.cos(), r * t.sin()), from, to);
    }

    // Geodesic between two points of the upper half-plane.
    fn geodesic(&mut self, p: (f64, f64), q: (f64, f64), circle: Option<(f64, f64)>) {
        match circle {
            Some((c, r)) => {
                let angle = |pt: (f64, f64)| (pt.1).atan2(pt.0 - c);
                let (a0, a1) = (angle(p), angle(q));
                self.semicircle(Layer::Hexagon, c, r, a0.min(a1), a0.max(a1));
            }
            None => self.lines.push(Polyline { layer: Layer::Hexagon, points: vec![p, q] }),
        }
    }
}

fn to_xy<S: Scalar>(p: &Point<S>, prec: u32) -> (f64, f64) {
    (p.x.to_real(prec).to_f64(), p.height(prec).to_f64())
}

fn hexagon<S: Scalar>(b: &mut Builder, root: &TreeNode<S>, params: &FrickeParams<S>, prec: u32) -> Result<()> {
    let [e, f, g] = root.matrices();
    let s = Mat2::translation(&params.a);
    let pe = e.fixed_point()?;
    let pf = f.fixed_point()?;
    let pfe = f.apply(&pe);
    let pg = g.fixed_point()?;
    let pae = s.apply(&pe);
    let chain = [&pe, &pf, &pfe, &pg, &pae];
    for w in chain.windows(2) {
        let circle = match hline_through(w[0], w[1]) {
            Ok(h) => Some((h.center.to_real(prec).to_f64(), h.radius(prec).to_f64())),
            Err(Error::VerticalLine) => None,
            Err(e) => return Err(e),
        };
        b.geodesic(to_xy(w[0], prec), to_xy(w[1], prec), circle);
    }
    // ∞ is drawn at the top of the window
    let top = b.w.y_max;
    for p in [&pe, &pae] {
        let (x, y) = to_xy(p, prec);
        b.lines.push(Polyline { layer: Layer::Hexagon, points: vec![(x, y), (x, top)] });
    }
    for (name, p) in [("e", &pe), ("f", &pf), ("F(e)", &pfe), ("g", &pg), ("a+e", &pae)] {
        let (x, y) = to_xy(p, prec);
        b.markers.push(Marker { layer: Layer::Hexagon, x, y, label: name.into() });
    }
    Ok(())
}

/// Collects the selected layers for every node up to `spec.depth`.
pub fn build_scene<S: Scalar>(params: &FrickeParams<S>, spec: &SceneSpec, prec: u32) -> Result<Scene> {
    let w = spec.window_for(params, prec)?;
    let scale = spec.width_px / (w.x_max - w.x_min);
    let mut b = Builder { w, tol: spec.sagitta_px / scale, lines: Vec::new(), markers: Vec::new() };
    let nodes: Vec<TreeNode<S>> = enumerate_tree(params, &Budget::depth(spec.depth))?.collect();
    let f64_of = |v: &S| v.to_real(prec).to_f64();
    let half = f64_of(&params.half_a());

    let root = &nodes[0];
    let mut elements: Vec<Mat2<S>> = root.matrices().to_vec();
    elements.extend(nodes.iter().skip(1).map(|n| n.e().matrix()));
    if spec.layers.uplift || spec.layers.isometric {
        for m in &elements {
            let region = m.uplift_region()?;
            let (c, k) = (f64_of(&region.center), f64_of(&region.scale));
            if spec.layers.uplift {
                b.uplift(c, k);
            }
            if spec.layers.isometric {
                b.semicircle(Layer::Isometric, c, k.sqrt(), 0.0, std::f64::consts::PI);
            }
        }
    }
    if spec.layers.intervals {
        b.lines.push(Polyline { layer: Layer::Horocycle, points: vec![(w.x_min, half), (w.x_max, half)] });
        let ivs = special_intervals(params).into_iter().chain(nodes.iter().map(|n| node_interval(n, params)));
        for iv in ivs {
            b.lines.push(Polyline { layer: Layer::Interval, points: vec![(iv.lo(prec).to_f64(), half), (iv.hi(prec).to_f64(), half)] });
        }
    }
    if spec.layers.punctures {
        for n in &nodes {
            let [_, f, g] = n.matrices();
            let (x, y) = to_xy(&apex_of_pair(&g, &f)?, prec);
            b.markers.push(Marker { layer: Layer::Puncture, x, y, label: n.path.to_string() });
        }
    }
    if spec.layers.hexagon {
        hexagon(&mut b, root, params, prec)?;
    }
    Ok(Scene { window: w, scale, lines: b.lines, markers: b.markers })
}

const STYLE: &str = "path{fill:none;vector-effect:non-scaling-stroke;stroke-width:1}\
.upper{stroke:#1f77b4}.lower{stroke:#ff7f0e}.iso{stroke:#999;stroke-dasharray:4 3}\
.horocycle{stroke:#444}.interval{stroke:#d62728;stroke-width:3}.hexagon{stroke:#2ca02c;stroke-width:1.5}\
circle.puncture{fill:#9467bd}circle.hexagon{fill:#2ca02c}";

/// Serializes a scene. Output depends only on the scene; the generator line is
/// the one place the crate version appears.
pub fn scene_svg(scene: &Scene) -> String {
    let w = scene.window;
    let s = scene.scale;
    let (wpx, hpx) = ((w.x_max - w.x_min) * s, (w.y_max - w.y_min) * s);
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(out, "<!-- generator: {GENERATOR} -->");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{wpx:.6}\" height=\"{hpx:.6}\" viewBox=\"0 0 {wpx:.6} {hpx:.6}\">"
    );
    let _ = writeln!(out, "<style>{STYLE}</style>");
    let _ = writeln!(out, "<defs><clipPath id=\"window\"><rect x=\"{:.6}\" y=\"{:.6}\" width=\"{:.6}\" height=\"{:.6}\"/></clipPath></defs>", w.x_min, w.y_min, w.x_max - w.x_min, w.y_max - w.y_min);
    // pixel = (s (X - x_min), s (y_max - Y))
    let _ = writeln!(
        out,
        "<g id=\"plane\" transform=\"matrix({s:.6} 0 0 {:.6} {:.6} {:.6})\" clip-path=\"url(#window)\">",
        -s,
        -s * w.x_min,
        s * w.y_max
    );
    for line in &scene.lines {
        let mut d = String::new();
        for (i, (x, y)) in line.points.iter().enumerate() {
            let _ = write!(d, "{}{x:.6} {y:.6}", if i == 0 { "M" } else { " L" });
        }
        let _ = writeln!(out, "<path class=\"{}\" d=\"{d}\"/>", line.layer.class());
    }
    let r = 3.0 / s;
    for m in &scene.markers {
        let _ = writeln!(
            out,
            "<circle class=\"{}\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"{r:.6}\"><title>{}</title></circle>",
            m.layer.class(),
            m.x,
            m.y,
            m.label
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

pub fn render_svg<S: Scalar>(params: &FrickeParams<S>, spec: &SceneSpec, prec: u32) -> Result<String> {
    Ok(scene_svg(&build_scene(params, spec, prec)?))
}
