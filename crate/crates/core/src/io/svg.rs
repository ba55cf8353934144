use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::base::{scene_edge_report, PipelineResult};
use crate::cap::Cap;
use crate::capgen::Scene2d;
use crate::forest::CutForest;
use crate::geom::Point2;
use crate::unfold::{CompositeCenterReport, Development};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerKind {
    Folds,
    Boundary,
    Cuts,
    Gaps,
    Base,
    Centers,
}

impl LayerKind {
    pub const ALL: [LayerKind; 6] = [
        LayerKind::Base,
        LayerKind::Folds,
        LayerKind::Boundary,
        LayerKind::Cuts,
        LayerKind::Gaps,
        LayerKind::Centers,
    ];

    pub fn class(self) -> &'static str {
        match self {
            LayerKind::Folds => "development",
            LayerKind::Boundary => "boundary",
            LayerKind::Cuts => "cuts",
            LayerKind::Gaps => "gaps",
            LayerKind::Base => "base",
            LayerKind::Centers => "centers",
        }
    }

    pub fn color(self) -> &'static str {
        match self {
            LayerKind::Folds => "#000000",
            LayerKind::Boundary => "#1f4fd8",
            LayerKind::Cuts => "#d62728",
            LayerKind::Gaps => "#ff8c00",
            LayerKind::Base => "#2ca02c",
            LayerKind::Centers => "#8c2bb0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Segment(Point2, Point2),
    Polygon(Vec<Point2>),
    Marker(Point2),
}

impl Shape {
    fn points(&self) -> Vec<Point2> {
        match self {
            Shape::Segment(a, b) => vec![*a, *b],
            Shape::Polygon(p) => p.clone(),
            Shape::Marker(p) => vec![*p],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub kind: LayerKind,
    pub shapes: Vec<Shape>,
}

/// Planar drawing with one layer per kind, in the fixed order of
/// [`LayerKind::ALL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetDocument {
    pub layers: Vec<Layer>,
}

impl Default for NetDocument {
    fn default() -> Self {
        Self {
            layers: LayerKind::ALL.iter().map(|&kind| Layer { kind, shapes: vec![] }).collect(),
        }
    }
}

impl NetDocument {
    pub fn layer(&self, kind: LayerKind) -> &Layer {
        self.layers.iter().find(|l| l.kind == kind).expect("every kind has a layer")
    }

    pub fn push(&mut self, kind: LayerKind, shape: Shape) {
        if let Some(l) = self.layers.iter_mut().find(|l| l.kind == kind) {
            l.shapes.push(shape);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .flat_map(|l| l.shapes.iter().flat_map(Shape::points))
            .all(|p| p.is_finite())
    }

    /// Bounding box grown by 5% on each side, as `(min, size)`.
    pub fn viewport(&self) -> (Point2, Point2) {
        let pts: Vec<Point2> = self.layers.iter().flat_map(|l| l.shapes.iter().flat_map(Shape::points)).collect();
        if pts.is_empty() {
            return (Point2::ORIGIN, Point2::new(1.0, 1.0));
        }
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for p in &pts {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let size = hi - lo;
        let pad = 0.05 * size.x.max(size.y).max(1e-9);
        (lo - Point2::new(pad, pad), size + Point2::new(2.0 * pad, 2.0 * pad))
    }

    /// Faces of `dev` split into fold, cut and boundary edges, plus gap
    /// segments. Fold edges are drawn once, cut edges once per copy.
    pub fn from_development(cap: &Cap, dev: &Development, forest: &CutForest) -> Self {
        let mut doc = Self::default();
        for (f, t) in cap.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let seg = Shape::Segment(dev.faces[f][k], dev.faces[f][(k + 1) % 3]);
                if forest.is_cut_edge(a, b) {
                    doc.push(LayerKind::Cuts, seg);
                } else if !dev.half_edges.contains_key(&(b, a)) {
                    doc.push(LayerKind::Boundary, seg);
                } else if a < b {
                    doc.push(LayerKind::Folds, seg);
                }
            }
        }
        for g in &dev.gap_segments {
            if g.length() > 1e-12 * dev.diameter {
                doc.push(LayerKind::Gaps, Shape::Segment(g.v, g.v_prime));
            }
        }
        doc
    }

    pub fn add_centers(&mut self, centers: &[CompositeCenterReport]) {
        for c in centers {
            self.push(LayerKind::Centers, Shape::Marker(c.center));
        }
    }

    pub fn from_pipeline(cap: &Cap, result: &PipelineResult) -> Self {
        let mut doc = Self::from_development(cap, &result.full.cap_net, &result.forest);
        doc.push(LayerKind::Base, Shape::Polygon(result.full.base_polygon.clone()));
        doc.add_centers(&result.centers);
        doc
    }

    /// Planar scene: the polygon, its cut paths, and for edge `edge` the
    /// reflected base.
    pub fn from_scene(scene: &Scene2d, edge: usize) -> Self {
        let mut doc = Self::default();
        let poly = &scene.polygon;
        let n = poly.len();
        for i in 0..n {
            doc.push(LayerKind::Boundary, Shape::Segment(poly[i], poly[(i + 1) % n]));
        }
        for tree in &scene.trees {
            let mut pts = tree.path.clone();
            pts.push(poly[tree.root]);
            for w in pts.windows(2) {
                doc.push(LayerKind::Cuts, Shape::Segment(w[0], w[1]));
            }
        }
        for i in 0..n {
            doc.push(LayerKind::Folds, Shape::Segment(poly[(i + 1) % n], poly[i]));
        }
        let (a, b) = (poly[edge % n], poly[(edge + 1) % n]);
        let d = (b - a).normalized();
        let reflected = poly
            .iter()
            .rev()
            .map(|&p| {
                let q = p - a;
                a + d * (2.0 * q.dot(d)) - q
            })
            .collect();
        doc.push(LayerKind::Base, Shape::Polygon(reflected));
        if let Ok(r) = scene_edge_report(scene, edge % n, 1e-9) {
            if let Some(root) = r.overlapping_root {
                doc.push(LayerKind::Centers, Shape::Marker(poly[root]));
            }
        }
        doc
    }
}

fn fmt(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').bytes().all(|c| c == b'0' || c == b'.') {
        "0.000000".into()
    } else {
        s
    }
}

/// SVG 1.1 text. The y-axis points up; elements follow layer and insertion
/// order so identical documents give identical bytes.
pub fn render_svg(doc: &NetDocument) -> String {
    let (lo, size) = doc.viewport();
    let top = lo.y + size.y;
    let px = |p: Point2| format!("{},{}", fmt(p.x), fmt(top - p.y + lo.y));
    let width = 0.003 * size.x.max(size.y);
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">",
        fmt(lo.x),
        fmt(lo.y),
        fmt(size.x),
        fmt(size.y),
        (800.0 * size.y / size.x).round()
    );
    for layer in &doc.layers {
        let color = layer.kind.color();
        let fill = match layer.kind {
            LayerKind::Base => format!("fill=\"{color}\" fill-opacity=\"0.25\""),
            LayerKind::Centers => format!("fill=\"{color}\""),
            _ => "fill=\"none\"".into(),
        };
        let _ = writeln!(
            s,
            "<g class=\"{}\" stroke=\"{color}\" {fill} stroke-width=\"{}\" stroke-linejoin=\"round\">",
            layer.kind.class(),
            fmt(width)
        );
        for shape in &layer.shapes {
            match shape {
                Shape::Segment(a, b) => {
                    let (pa, pb) = (px(*a), px(*b));
                    let _ = writeln!(s, "<polyline points=\"{pa} {pb}\"/>");
                }
                Shape::Polygon(p) => {
                    let pts: Vec<String> = p.iter().map(|&q| px(q)).collect();
                    let _ = writeln!(s, "<polygon points=\"{}\"/>", pts.join(" "));
                }
                Shape::Marker(p) => {
                    let q = Point2::new(p.x, top - p.y + lo.y);
                    let _ = writeln!(
                        s,
                        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
                        fmt(q.x),
                        fmt(q.y),
                        fmt(2.0 * width)
                    );
                }
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(doc: &NetDocument, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path, render_svg(doc))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capgen::{generate_counterexample, AdversarialScene};

    #[test]
    fn empty_document() {
        let s = render_svg(&NetDocument::default());
        assert!(s.starts_with("<?xml"));
        assert_eq!(s.matches("<g ").count(), 6);
        assert_eq!(s.matches("</g>").count(), 6);
        assert!(s.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn viewport_margin() {
        let mut doc = NetDocument::default();
        doc.push(LayerKind::Folds, Shape::Segment(Point2::new(0.0, 0.0), Point2::new(2.0, 1.0)));
        let (lo, size) = doc.viewport();
        assert!(lo.dist(Point2::new(-0.1, -0.1)) < 1e-12);
        assert!(size.dist(Point2::new(2.2, 1.2)) < 1e-12);
    }

    #[test]
    fn scene_layers_colored() {
        let scene = generate_counterexample(&AdversarialScene::new(12, 0.05)).unwrap();
        let s = render_svg(&NetDocument::from_scene(&scene, 0));
        for (class, color) in [("cuts", "#d62728"), ("boundary", "#1f4fd8"), ("development", "#000000")] {
            assert!(s.contains(&format!("<g class=\"{class}\" stroke=\"{color}\"")));
        }
        assert!(!NetDocument::from_scene(&scene, 0).layer(LayerKind::Cuts).shapes.is_empty());
    }

    #[test]
    fn negative_zero_prints_as_zero() {
        assert_eq!(fmt(-1e-12), "0.000000");
        assert_eq!(fmt(-0.5), "-0.500000");
    }
}
