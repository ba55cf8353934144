//! Safe boundary edges and attachment of the base.
//!
//! The base `B` is flipped out across a boundary edge `e` of the developed
//! cap to `B′`. An edge is locally safe when the composite centers of the
//! trees at its endpoints lie strictly underneath it (inside the slab below
//! `e`), and globally safe when in addition no gap segment rises above `e`
//! and `B′` overlaps no developed face.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cap::{
    curvature_bounds_check, project, validate_cap, BoundsReport, Cap, CapError, CapMetrics,
};
use crate::capgen::Scene2d;
use crate::forest::{
    build_forest, check_forest, ApexChoice, CutForest, ForestError, ForestReport, QuadrantFrame,
};
use crate::geom::{compose, polygon_area, polygons_overlap_with, GeomError, Point2, Rigid2, RotationSeq};
use crate::unfold::{
    check_development, check_net_simple, develop, tree_center, CompositeCenterReport, Development,
    DevelopmentReport, NetCheck, UnfoldError,
};

/// Default relative tolerance (lengths are scaled by the cap diameter).
pub const DEFAULT_TOL: f64 = 1e-9;
/// Relative margin by which a center must sit below `e`.
pub const STRICT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaseError {
    #[error(transparent)]
    Cap(#[from] CapError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("edge {edge} is not safe: {reason}")]
    UnsafeEdge { edge: usize, reason: String },
    #[error("developed cap overlaps itself (faces {0} and {1})")]
    NetOverlap(usize, usize),
    #[error("no globally safe edge among {} boundary edges", reports.len())]
    NoSafeEdge { reports: Vec<SafeEdgeReport> },
}

/// Frame with `e = (a, b)` on the x-axis from the origin and the cap below.
#[derive(Debug, Clone, Copy)]
struct EdgeFrame {
    origin: Point2,
    dir: Point2,
    length: f64,
}

impl EdgeFrame {
    fn new(a: Point2, b: Point2) -> Self {
        Self {
            origin: a,
            dir: (b - a).normalized(),
            length: a.dist(b),
        }
    }

    /// Outward normal: right of `a → b`, the cap being on the left.
    fn normal(&self) -> Point2 {
        Point2::new(self.dir.y, -self.dir.x)
    }

    fn local(&self, p: Point2) -> Point2 {
        let d = p - self.origin;
        Point2::new(d.dot(self.dir), d.dot(self.normal()))
    }

    fn under(&self, p: Point2, tol: f64) -> bool {
        let q = self.local(p);
        q.x > 0.0 && q.x < self.length && q.y < -tol
    }

    fn reflect(&self, p: Point2) -> Point2 {
        let q = self.local(p);
        self.origin + self.dir * q.x - self.normal() * q.y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterCheck {
    pub root: usize,
    pub top: usize,
    pub center: Point2,
    /// Center in the edge frame: x along `e`, y along the outward normal.
    pub local: Point2,
    pub underneath: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    CenterNotUnder { root: usize, top: usize, local: Point2 },
    GapRises { root: usize, top: usize, rise: f64 },
    Overlap { face: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafeEdgeReport {
    /// Index `i` of `(boundary[i], boundary[i+1])`.
    pub edge: usize,
    pub vertices: (usize, usize),
    pub locally_safe: bool,
    /// No gap segment points above `e`.
    pub gaps_below: bool,
    /// `B′` overlaps no developed face.
    pub base_clear: bool,
    pub globally_safe: bool,
    pub centers: Vec<CenterCheck>,
    pub witness: Option<Witness>,
}

impl SafeEdgeReport {
    /// The gap criterion and the overlap check disagree.
    pub fn criteria_disagree(&self) -> bool {
        self.gaps_below != self.base_clear
    }
}

fn edge_frame(dev: &Development, cap: &Cap, edge: usize) -> Result<EdgeFrame, BaseError> {
    let (a, b) = dev
        .boundary_edge(cap, edge)
        .ok_or(UnfoldError::BadEdge(edge))?;
    Ok(EdgeFrame::new(a, b))
}

fn edge_vertices(cap: &Cap, edge: usize) -> (usize, usize) {
    let m = cap.boundary.len();
    (cap.boundary[edge % m], cap.boundary[(edge + 1) % m])
}

/// Local part of the safe-edge test: every composite center of a tree at
/// either endpoint lies strictly inside the slab underneath `e`.
pub fn locally_safe(
    dev: &Development,
    cap: &Cap,
    forest: &CutForest,
    edge: usize,
    tol: f64,
) -> Result<SafeEdgeReport, BaseError> {
    let frame = edge_frame(dev, cap, edge)?;
    let (v, u) = edge_vertices(cap, edge);
    let strict = STRICT_TOL * dev.diameter.max(tol);
    let mut centers = Vec::new();
    let mut witness = None;
    for tree in forest.trees().iter().filter(|t| t.root == v || t.root == u) {
        let report = match tree_center(cap, dev, forest, tree) {
            Ok(r) => r,
            // A flat tree opens no gap.
            Err(UnfoldError::Degenerate { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        let local = frame.local(report.center);
        let underneath = frame.under(report.center, strict);
        if !underneath && witness.is_none() {
            witness = Some(Witness::CenterNotUnder { root: tree.root, top: tree.top, local });
        }
        centers.push(CenterCheck {
            root: tree.root,
            top: tree.top,
            center: report.center,
            local,
            underneath,
        });
    }
    let locally_safe = centers.iter().all(|c| c.underneath);
    Ok(SafeEdgeReport {
        edge,
        vertices: (v, u),
        locally_safe,
        gaps_below: false,
        base_clear: false,
        globally_safe: false,
        centers,
        witness,
    })
}

/// Base polygon flipped across the developed copy of `edge`.
pub fn reflected_base(dev: &Development, cap: &Cap, edge: usize) -> Result<Vec<Point2>, BaseError> {
    let frame = edge_frame(dev, cap, edge)?;
    let (v, u) = edge_vertices(cap, edge);
    let (pv, pu) = (cap.vertices[v].xy(), cap.vertices[u].xy());
    let to_dev = Rigid2::from_segments(pv, pu, frame.origin, frame.origin + frame.dir * pv.dist(pu));
    // Reflection reverses orientation; reverse the order to stay
    // counterclockwise.
    let mut out: Vec<Point2> = cap
        .boundary_polygon()
        .into_iter()
        .map(|p| frame.reflect(to_dev.apply(p)))
        .collect();
    out.reverse();
    Ok(out)
}

fn bbox(points: &[Point2]) -> (Point2, Point2) {
    points.iter().fold(
        (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), p| (Point2::new(lo.x.min(p.x), lo.y.min(p.y)), Point2::new(hi.x.max(p.x), hi.y.max(p.y))),
    )
}

/// First developed face whose interior meets `poly` by more than `tol`.
fn first_face_overlap(dev: &Development, poly: &[Point2], tol: f64) -> Option<usize> {
    let (lo, hi) = bbox(poly);
    (0..dev.faces.len()).find(|&f| {
        let (flo, fhi) = bbox(&dev.faces[f]);
        if flo.x > hi.x + tol || fhi.x < lo.x - tol || flo.y > hi.y + tol || fhi.y < lo.y - tol {
            return false;
        }
        polygons_overlap_with(&dev.faces[f], poly, tol).unwrap_or(true)
    })
}

/// Full safe-edge test. A gap segment runs from the copy of its root in
/// the face nearer the development root (fewer fold crossings) to the
/// farther copy; it rises when that direction has a positive component
/// along the outward normal of `e`. `tol` is relative to the diameter.
pub fn globally_safe(
    dev: &Development,
    cap: &Cap,
    forest: &CutForest,
    edge: usize,
    tol: f64,
) -> Result<SafeEdgeReport, BaseError> {
    let mut report = locally_safe(dev, cap, forest, edge, tol)?;
    let frame = edge_frame(dev, cap, edge)?;
    let abs_tol = tol * dev.diameter;
    let normal = frame.normal();
    let mut gaps_ok = true;
    for g in &dev.gap_segments {
        let (near, far) = if dev.depth[g.v_face] <= dev.depth[g.v_prime_face] {
            (g.v, g.v_prime)
        } else {
            (g.v_prime, g.v)
        };
        let rise = (far - near).dot(normal);
        if rise > abs_tol {
            gaps_ok = false;
            if report.witness.is_none() {
                report.witness = Some(Witness::GapRises { root: g.root, top: g.top, rise });
            }
        }
    }
    let base = reflected_base(dev, cap, edge)?;
    let overlap = first_face_overlap(dev, &base, abs_tol);
    if let Some(face) = overlap {
        if report.witness.is_none() || report.locally_safe && gaps_ok {
            report.witness = Some(Witness::Overlap { face });
        }
    }
    report.gaps_below = gaps_ok;
    report.base_clear = overlap.is_none();
    report.globally_safe = report.locally_safe && gaps_ok && overlap.is_none();
    Ok(report)
}

/// Developed cap with the base attached.
#[derive(Debug, Clone)]
pub struct FullNet {
    pub cap_net: Development,
    pub base_polygon: Vec<Point2>,
    pub attach_edge: usize,
    pub total_area: f64,
    pub expected_area: f64,
}

impl FullNet {
    pub fn relative_area_error(&self) -> f64 {
        (self.total_area - self.expected_area).abs() / self.expected_area
    }
}

/// Flips the base out across `edge`, verifying congruence, the shared edge
/// and the absence of overlap before returning.
pub fn attach_base(dev: &Development, cap: &Cap, edge: usize, tol: f64) -> Result<FullNet, BaseError> {
    let abs_tol = tol * dev.diameter;
    let base = reflected_base(dev, cap, edge)?;
    let unsafe_edge = |reason: String| BaseError::UnsafeEdge { edge, reason };
    if let Some(face) = first_face_overlap(dev, &base, abs_tol) {
        return Err(unsafe_edge(format!("reflected base overlaps face {face}")));
    }
    let orig = cap.boundary_polygon();
    let m = orig.len();
    // B′ is listed in reverse: B′[m−1−i] is the image of B[i].
    let image = |i: usize| base[m - 1 - (i % m)];
    for i in 0..m {
        let d0 = orig[i].dist(orig[(i + 1) % m]);
        let d1 = image(i).dist(image(i + 1));
        if (d0 - d1).abs() > abs_tol {
            return Err(unsafe_edge(format!("reflected base side {i} off by {:e}", d0 - d1)));
        }
        let a0 = (orig[(i + 2) % m] - orig[(i + 1) % m]).angle() - (orig[i] - orig[(i + 1) % m]).angle();
        let a1 = (image(i + 2) - image(i + 1)).angle() - (image(i) - image(i + 1)).angle();
        if (crate::geom::normalize_angle(a0 + a1)).abs() > tol {
            return Err(unsafe_edge(format!("reflected base angle {i} differs")));
        }
    }
    let (pa, pb) = dev.boundary_edge(cap, edge).ok_or(UnfoldError::BadEdge(edge))?;
    let (ia, ib) = (image(edge), image(edge + 1));
    if ia.dist(pa) > abs_tol || ib.dist(pb) > abs_tol {
        return Err(unsafe_edge("reflected base does not share the edge".into()));
    }
    let base_area = polygon_area(&base).abs();
    Ok(FullNet {
        cap_net: dev.clone(),
        base_polygon: base,
        attach_edge: edge,
        total_area: dev.area() + base_area,
        expected_area: cap.surface_area() + cap.base_area(),
    })
}

/// Everything the pipeline computes, kept for reporting.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub metrics: CapMetrics,
    pub bounds: BoundsReport,
    pub apex: ApexChoice,
    pub frame: QuadrantFrame,
    pub forest: CutForest,
    pub forest_report: ForestReport,
    pub development: DevelopmentReport,
    pub net: NetCheck,
    pub centers: Vec<CompositeCenterReport>,
    pub scan_order: Vec<usize>,
    pub edge_reports: Vec<SafeEdgeReport>,
    pub full: FullNet,
    pub timing: Timing,
}

impl PipelineResult {
    pub fn safe_edge_count(&self) -> usize {
        self.edge_reports.iter().filter(|r| r.globally_safe).count()
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Timing {
    pub forest_ms: f64,
    pub develop_ms: f64,
    pub scan_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineConfig {
    pub delta_theta: f64,
    pub tol: f64,
    /// Force this boundary edge instead of scanning.
    pub edge: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            delta_theta: 3f64.to_radians(),
            tol: DEFAULT_TOL,
            edge: None,
        }
    }
}

/// Composite centers of all trees with nonzero curvature, and the total
/// curvature of every tree.
pub fn tree_centers(
    cap: &Cap,
    dev: &Development,
    forest: &CutForest,
) -> Result<(Vec<CompositeCenterReport>, Vec<f64>), BaseError> {
    let mut centers = Vec::new();
    let mut omegas = Vec::new();
    for tree in forest.trees() {
        match tree_center(cap, dev, forest, &tree) {
            Ok(r) => {
                omegas.push(r.omega_total);
                centers.push(r);
            }
            Err(UnfoldError::Degenerate { .. }) => omegas.push(0.0),
            Err(e) => return Err(e.into()),
        }
    }
    Ok((centers, omegas))
}

/// Scan order: the gap edge, then the remaining boundary edges from the
/// most to the least orthogonal to the gap direction.
pub fn scan_order(cap: &Cap, apex: &ApexChoice) -> Vec<usize> {
    let poly = cap.boundary_polygon();
    let m = poly.len();
    let dir = Point2::from_angle(apex.gap_direction);
    let slant = |i: usize| (poly[(i + 1) % m] - poly[i]).normalized().dot(dir).abs();
    let mut rest: Vec<usize> = (0..m).filter(|&i| i != apex.gap_edge).collect();
    rest.sort_by(|&a, &b| slant(a).total_cmp(&slant(b)).then(a.cmp(&b)));
    let mut order = vec![apex.gap_edge];
    order.extend(rest);
    order
}

/// project → apex → axes → forest → develop → net check → safe-edge scan →
/// attach. Every edge is evaluated so the report can count safe edges; the
/// first safe edge in scan order is used.
pub fn unfold_polyhedron(cap: &Cap, cfg: &PipelineConfig) -> Result<PipelineResult, BaseError> {
    let t0 = Instant::now();
    let metrics = validate_cap(cap)?;
    let g = project(cap)?;
    let (apex, frame, forest) = build_forest(&g, cfg.delta_theta)?;
    let forest_report = check_forest(&forest, &g, &frame);
    let t1 = Instant::now();

    let scan = match cfg.edge {
        Some(e) if e < cap.boundary.len() => vec![e],
        Some(e) => return Err(UnfoldError::BadEdge(e).into()),
        None => scan_order(cap, &apex),
    };
    let dev = develop(cap, &forest, Some(scan[0]))?;
    let development = check_development(cap, &dev, &forest);
    let net = check_net_simple(&dev, cfg.tol * dev.diameter);
    if let Some((a, b)) = net.first_overlap {
        return Err(BaseError::NetOverlap(a, b));
    }
    let (_, tree_omegas) = tree_centers(cap, &dev, &forest)?;
    let bounds = curvature_bounds_check(&metrics, cfg.delta_theta, Some(&tree_omegas));
    let t2 = Instant::now();

    let mut edge_reports = Vec::with_capacity(scan.len());
    for &e in &scan {
        edge_reports.push(globally_safe(&dev, cap, &forest, e, cfg.tol)?);
    }
    let chosen = edge_reports.iter().find(|r| r.globally_safe).map(|r| r.edge);
    let t3 = Instant::now();
    let Some(edge) = chosen else {
        return Err(BaseError::NoSafeEdge { reports: edge_reports });
    };
    let final_dev = if edge == scan[0] {
        dev
    } else {
        develop(cap, &forest, Some(edge))?
    };
    let (centers, _) = tree_centers(cap, &final_dev, &forest)?;
    let full = attach_base(&final_dev, cap, edge, cfg.tol)?;
    let ms = |a: Instant, b: Instant| (b - a).as_secs_f64() * 1e3;
    let t4 = Instant::now();
    edge_reports.sort_by_key(|r| r.edge);
    Ok(PipelineResult {
        metrics,
        bounds,
        apex,
        frame,
        forest,
        forest_report,
        development,
        net,
        centers,
        scan_order: scan,
        edge_reports,
        full,
        timing: Timing {
            forest_ms: ms(t0, t1),
            develop_ms: ms(t1, t2),
            scan_ms: ms(t2, t3),
            total_ms: ms(t0, t4),
        },
    })
}

/// Safety of one edge of a planar scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneEdgeReport {
    pub edge: usize,
    pub locally_safe: bool,
    pub gaps_below: bool,
    pub base_clear: bool,
    pub globally_safe: bool,
    /// Deepest penetration witness: the tree whose moved sector enters `B′`.
    pub overlapping_root: Option<usize>,
}

/// Motion of the sector that opens at a scene tree's root. Positive
/// rotations compose directly; clockwise ones are composed in the mirror
/// image.
fn scene_motion(seq: &RotationSeq, clockwise: bool) -> Result<Rigid2, GeomError> {
    if !clockwise {
        return compose(seq);
    }
    let mirror = |p: Point2| Point2::new(p.x, -p.y);
    let mirrored = RotationSeq::new(
        seq.items()
            .iter()
            .map(|r| crate::geom::Rotation::new(r.omega, mirror(r.center)))
            .collect(),
    )?;
    let m = compose(&mirrored)?;
    Ok(Rigid2::new(-m.angle, mirror(m.t)))
}

/// Evaluates boundary edge `(P_k, P_{k+1})` of a planar scene. At every
/// root the cut splits the corner into two sectors; the one farther from
/// `e` along the boundary opens away from the cut by the tree's composed
/// rotation. That sector (a triangle on the cut and the boundary edge) is
/// tested against the base reflected across `e`.
pub fn scene_edge_report(scene: &Scene2d, k: usize, tol: f64) -> Result<SceneEdgeReport, GeomError> {
    let poly = &scene.polygon;
    let n = poly.len();
    let frame = EdgeFrame::new(poly[k], poly[(k + 1) % n]);
    let reflected: Vec<Point2> = poly.iter().rev().map(|&p| frame.reflect(p)).collect();
    let head = (k + 1) % n;
    let mut local = true;
    let mut gaps = true;
    let mut overlapping_root = None;
    for tree in &scene.trees {
        let j = tree.root;
        let w = poly[j];
        let Some(&inner) = tree.path.last() else { continue };
        let u = (w - inner).normalized();
        let after = (j + n - head) % n;
        let before = (k + n - j) % n;
        let moved_prev = j == k || (j != head && before <= after);
        let neighbor = if moved_prev { poly[(j + n - 1) % n] } else { poly[(j + 1) % n] };
        let clockwise = u.cross(neighbor - w) < 0.0;
        let seq = tree.rotations()?;
        if seq.total_angle() <= 0.0 {
            continue;
        }
        let motion = scene_motion(&seq, clockwise)?;
        if j == k || j == head {
            let c = motion.fixed_point()?;
            if !frame.under(c, STRICT_TOL) {
                local = false;
            }
        }
        let moved = motion.apply(w);
        if (moved - w).dot(frame.normal()) > tol {
            gaps = false;
        }
        let reach = w.dist(inner).min(0.5 * w.dist(neighbor));
        let x = w + (neighbor - w).normalized() * reach;
        let mut sector = vec![motion.apply(inner), moved, motion.apply(x)];
        if crate::geom::signed_area2(&sector) < 0.0 {
            sector.reverse();
        }
        if overlapping_root.is_none() && polygons_overlap_with(&sector, &reflected, tol)? {
            overlapping_root = Some(j);
        }
    }
    Ok(SceneEdgeReport {
        edge: k,
        locally_safe: local,
        gaps_below: gaps,
        base_clear: overlapping_root.is_none(),
        globally_safe: local && gaps && overlapping_root.is_none(),
        overlapping_root,
    })
}

pub fn scene_reports(scene: &Scene2d, tol: f64) -> Result<Vec<SceneEdgeReport>, GeomError> {
    (0..scene.polygon.len()).map(|k| scene_edge_report(scene, k, tol)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStep {
    pub omega: f64,
    pub overlapping_edges: usize,
    pub safe_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub n_gon: usize,
    pub steps: Vec<SweepStep>,
    /// Smallest swept `ω` at which `B′` overlaps the scene at every edge.
    pub threshold: Option<f64>,
}

/// Sweeps `ω` upward over `omegas` for the adversarial scene, stopping at
/// the first value where every edge's reflected base is overlapped or when
/// the total curvature would reach 2π.
pub fn sweep_counterexample(
    n_gon: usize,
    cut_angle: f64,
    omegas: &[f64],
    tol: f64,
) -> Result<SweepResult, BaseError> {
    let mut steps = Vec::new();
    let mut threshold = None;
    for &omega in omegas {
        if n_gon as f64 * omega >= std::f64::consts::TAU {
            break;
        }
        let scene = crate::capgen::generate_counterexample(&crate::capgen::AdversarialScene {
            n_gon,
            omega,
            cut_angle,
        })
        .map_err(|e| BaseError::UnsafeEdge { edge: 0, reason: e.to_string() })?;
        let reports = scene_reports(&scene, tol)?;
        let overlapping_edges = reports.iter().filter(|r| !r.base_clear).count();
        steps.push(SweepStep {
            omega,
            overlapping_edges,
            safe_edges: reports.iter().filter(|r| r.globally_safe).count(),
        });
        if overlapping_edges == n_gon {
            threshold = Some(omega);
            break;
        }
    }
    Ok(SweepResult { n_gon, steps, threshold })
}

/// Geometric sweep grid `start·ratio^i` up to `stop`.
pub fn omega_grid(start: f64, stop: f64, ratio: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut w = start;
    while w <= stop * (1.0 + 1e-12) {
        out.push(w);
        w *= ratio;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cap::Point3;
    use crate::capgen::{generate_cap, generate_counterexample, AdversarialScene, GenParams};
    use std::f64::consts::PI;

    fn hexagon(h: f64) -> Cap {
        let mut vertices: Vec<Point3> = (0..6)
            .map(|i| {
                let a = i as f64 * PI / 3.0;
                Point3::new(a.cos(), a.sin(), 0.0)
            })
            .collect();
        vertices.push(Point3::new(0.02, 0.01, h));
        Cap {
            vertices,
            triangles: (0..6).map(|i| [i, (i + 1) % 6, 6]).collect(),
            boundary: (0..6).collect(),
        }
    }

    #[test]
    fn pyramid_full_net_area() {
        let cap = hexagon(0.05);
        let r = unfold_polyhedron(&cap, &PipelineConfig::default()).unwrap();
        assert!(r.full.relative_area_error() < 1e-9);
        let expected = cap.surface_area() + 1.5 * 3f64.sqrt();
        assert!((r.full.expected_area - expected).abs() < 1e-12);
        for rep in &r.edge_reports {
            assert!(!rep.globally_safe || rep.locally_safe);
        }
    }

    #[test]
    fn flat_hexagon_all_edges_safe() {
        let mut cap = hexagon(1e-300);
        cap.vertices[6].z = 1e-300;
        let r = unfold_polyhedron(&cap, &PipelineConfig::default()).unwrap();
        assert_eq!(r.safe_edge_count(), 6);
        // B′ is the mirror image of the hexagon across the attach edge.
        assert_eq!(r.full.base_polygon.len(), 6);
        assert!((polygon_area(&r.full.base_polygon) - 1.5 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn generated_caps_unfold() {
        for seed in 0..5 {
            let cap = generate_cap(&GenParams { seed, ..Default::default() }).unwrap();
            let r = unfold_polyhedron(&cap, &PipelineConfig::default()).unwrap();
            assert!(r.safe_edge_count() >= 1);
            let gap = r.edge_reports.iter().find(|e| e.edge == r.apex.gap_edge).unwrap();
            assert!(gap.locally_safe, "seed {seed}: {gap:?}");
            assert!(r.full.relative_area_error() < 1e-9);
        }
    }

    #[test]
    fn reflection_is_involution() {
        let f = EdgeFrame::new(Point2::new(0.3, -0.2), Point2::new(1.1, 0.5));
        let p = Point2::new(-0.7, 2.2);
        assert!(f.reflect(f.reflect(p)).dist(p) < 1e-15);
        assert!(f.local(Point2::new(1.1, 0.5)).dist(Point2::new(f.length, 0.0)) < 1e-15);
    }

    #[test]
    fn counterexample_edges_unsafe() {
        let s = generate_counterexample(&AdversarialScene::new(12, 0.01)).unwrap();
        let reports = scene_reports(&s, 1e-9).unwrap();
        for r in &reports {
            assert!(!r.locally_safe, "{r:?}");
            assert!(!r.base_clear, "{r:?}");
            assert!(!r.globally_safe);
            assert_eq!(r.overlapping_root, Some(r.edge));
        }
    }

    #[test]
    fn octagon_never_overlaps() {
        let grid = omega_grid(1e-6, 0.3, 1.5);
        let r = sweep_counterexample(8, 5f64.to_radians(), &grid, 1e-9).unwrap();
        assert!(r.threshold.is_none());
        let r = sweep_counterexample(12, 5f64.to_radians(), &grid, 1e-9).unwrap();
        assert!(r.threshold.is_some());
    }

    #[test]
    fn clockwise_motion_negates_angles() {
        let pairs = [(0.2, Point2::new(0.5, 0.1)), (0.1, Point2::new(-0.3, 0.4))];
        let seq = RotationSeq::from_pairs(&pairs).unwrap();
        let cw = scene_motion(&seq, true).unwrap();
        let direct = pairs
            .iter()
            .fold(Rigid2::IDENTITY, |m, &(w, c)| m.then(&Rigid2::rotation_about(-w, c)));
        let p = Point2::new(0.7, -0.2);
        assert!(cw.apply(p).dist(direct.apply(p)) < 1e-12);
        assert!((cw.angle + 0.3).abs() < 1e-12);
    }
}
