//! Quadrant-based angle-monotone cut forests.
//!
//! Four near-quadrants of width `θ = π/2 − Δθ` are apexed at an internal
//! vertex `q`, leaving a cone gap of aperture `4Δθ` aimed at the boundary.
//! Paths grown inside each quadrant with steps from that quadrant's wedge
//! never leave it and end on the boundary.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cap::ProjectionGraph;
use crate::geom::{normalize_angle, Point2};

/// Angular slack when deciding whether a vertex sits on an axis.
pub const AXIS_TOL: f64 = 1e-9;
/// Step of the axis perturbation search, in radians.
pub const AXIS_STEP: f64 = 1e-7;
/// Angular slack for wedge membership of a step direction.
const WEDGE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForestError {
    #[error("projection has no internal vertices")]
    NoInternalVertices,
    #[error("internal vertex {vertex} lies inside the cone gap")]
    NonEmptyCone { vertex: usize },
    #[error("no axis rotation within ±{limit:e} rad clears all vertices from the axes")]
    CannotOrient { limit: f64 },
    #[error("vertex {vertex} has no edge inside the wedge of quadrant {quadrant}")]
    Stuck { vertex: usize, quadrant: usize },
    #[error("vertex {vertex} reached from quadrant {from} but belongs to quadrant {to}")]
    QuadrantMismatch { vertex: usize, from: usize, to: usize },
    #[error("delta_theta must be in [0, π/4), got {0}")]
    BadSlant(f64),
}

/// Result of [`select_apex`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApexChoice {
    pub apex: usize,
    /// Direction from the apex to its nearest boundary point.
    pub gap_direction: f64,
    pub nearest_point: Point2,
    pub distance: f64,
    /// Index `i` of the boundary edge `(boundary[i], boundary[i+1])` the gap
    /// is aimed at.
    pub gap_edge: usize,
    /// Set when the nearest boundary point is a polygon vertex, so the gap
    /// edge is the incident edge most orthogonal to the gap direction.
    pub at_vertex: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrantFrame {
    pub apex: usize,
    pub apex_pos: Point2,
    /// Direction of the vertical axis; the cone gap is centered on it.
    pub axis_angle: f64,
    pub theta: f64,
    pub delta_theta: f64,
    /// Gap direction requested before any axis perturbation.
    pub gap_direction: f64,
}

impl QuadrantFrame {
    pub fn new(apex: usize, apex_pos: Point2, axis_angle: f64, delta_theta: f64) -> Self {
        Self {
            apex,
            apex_pos,
            axis_angle,
            theta: FRAC_PI_2 - delta_theta,
            delta_theta,
            gap_direction: axis_angle,
        }
    }

    /// Clockwise (closed) bounding direction of quadrant `i`.
    pub fn quadrant_start(&self, i: usize) -> f64 {
        self.axis_angle + 2.0 * self.delta_theta + i as f64 * self.theta
    }

    /// Directions of the five rays bounding the quadrants and the gap.
    pub fn axes(&self) -> [f64; 5] {
        [
            self.quadrant_start(0),
            self.quadrant_start(1),
            self.quadrant_start(2),
            self.quadrant_start(3),
            self.quadrant_start(4),
        ]
    }

    /// Quadrant containing `p`, or `None` inside the gap. The apex is in
    /// quadrant 0.
    pub fn quadrant_of_point(&self, p: Point2) -> Option<usize> {
        if p == self.apex_pos {
            return Some(0);
        }
        let rel = (p - self.apex_pos).angle() - self.quadrant_start(0);
        let rel = rel.rem_euclid(TAU);
        let i = (rel / self.theta).floor();
        if i < 4.0 {
            Some(i as usize)
        } else {
            None
        }
    }

    /// True if the direction `angle` lies in the closed wedge of quadrant `i`.
    pub fn in_wedge(&self, i: usize, angle: f64) -> bool {
        let rel = (angle - self.quadrant_start(i)).rem_euclid(TAU);
        rel <= self.theta + WEDGE_TOL || rel >= TAU - WEDGE_TOL
    }

    pub fn wedge_bisector(&self, i: usize) -> f64 {
        self.quadrant_start(i) + 0.5 * self.theta
    }

    /// True if `p` lies in the open cone gap.
    pub fn in_gap(&self, p: Point2) -> bool {
        p != self.apex_pos
            && normalize_angle((p - self.apex_pos).angle() - self.axis_angle).abs()
                < 2.0 * self.delta_theta
    }
}

/// Boundary-rooted spanning forest of the internal vertices.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CutForest {
    pub parent: BTreeMap<usize, usize>,
    pub roots: BTreeSet<usize>,
    pub quadrant_of: BTreeMap<usize, usize>,
}

/// The subtree hanging from one cut edge `(top, root)` at a boundary root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub root: usize,
    pub top: usize,
    /// Vertices in preorder from `top`, children by increasing id.
    pub vertices: Vec<usize>,
}

impl CutForest {
    pub fn children(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&c, &p) in &self.parent {
            out.entry(p).or_default().push(c);
        }
        out
    }

    /// Forest edges as `(child, parent)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent.iter().map(|(&c, &p)| (c, p)).collect()
    }

    pub fn is_cut_edge(&self, a: usize, b: usize) -> bool {
        self.parent.get(&a) == Some(&b) || self.parent.get(&b) == Some(&a)
    }

    /// Path from `v` to its root, both included. Stops after `limit` steps.
    pub fn path_to_root(&self, v: usize, limit: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(&p) = self.parent.get(&cur) {
            path.push(p);
            cur = p;
            if path.len() > limit {
                break;
            }
        }
        path
    }

    pub fn trees(&self) -> Vec<Tree> {
        let children = self.children();
        let mut out = Vec::new();
        for &root in &self.roots {
            for &top in children.get(&root).map(Vec::as_slice).unwrap_or(&[]) {
                let mut vertices = Vec::new();
                let mut stack = vec![top];
                while let Some(v) = stack.pop() {
                    vertices.push(v);
                    if let Some(cs) = children.get(&v) {
                        stack.extend(cs.iter().rev());
                    }
                }
                out.push(Tree { root, top, vertices });
            }
        }
        out
    }
}

/// Euclidean distance from `p` to the closed polygon boundary, with the
/// nearest point and the edge index it lies on.
fn nearest_on_boundary(poly: &[Point2], p: Point2) -> (f64, Point2, usize, f64) {
    let n = poly.len();
    let mut best = (f64::INFINITY, p, 0, 0.0);
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let ab = b - a;
        let t = ((p - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
        let q = a + ab * t;
        let d = q.dist(p);
        if d < best.0 {
            best = (d, q, i, t);
        }
    }
    best
}

/// Picks the internal vertex nearest to the boundary polygon; the cone gap
/// is aimed at its nearest boundary point.
pub fn select_apex(g: &ProjectionGraph) -> Result<ApexChoice, ForestError> {
    let poly = g.boundary_polygon();
    let mut best: Option<(f64, usize, Point2, usize, f64)> = None;
    for v in g.internal_vertices() {
        let (d, q, e, t) = nearest_on_boundary(&poly, g.positions[v]);
        if best.is_none_or(|b| d < b.0) {
            best = Some((d, v, q, e, t));
        }
    }
    let (distance, apex, nearest_point, edge, t) = best.ok_or(ForestError::NoInternalVertices)?;
    let gap_direction = (nearest_point - g.positions[apex]).angle();
    let n = poly.len();
    let at_vertex = t <= 1e-9 || t >= 1.0 - 1e-9;
    let gap_edge = if at_vertex {
        let corner = if t <= 1e-9 { edge } else { (edge + 1) % n };
        let incident = [(corner + n - 1) % n, corner];
        let dir = Point2::from_angle(gap_direction);
        let slant = |i: usize| {
            let e = (poly[(i + 1) % n] - poly[i]).normalized();
            e.dot(dir).abs()
        };
        if slant(incident[0]) <= slant(incident[1]) {
            incident[0]
        } else {
            incident[1]
        }
    } else {
        edge
    };
    Ok(ApexChoice {
        apex,
        gap_direction,
        nearest_point,
        distance,
        gap_edge,
        at_vertex,
    })
}

/// Internal vertices inside the open cone gap of `frame`.
pub fn cone_violations(g: &ProjectionGraph, frame: &QuadrantFrame) -> Vec<usize> {
    g.internal_vertices()
        .into_iter()
        .filter(|&v| v != frame.apex && frame.in_gap(g.positions[v]))
        .collect()
}

/// Vertices other than the apex lying within [`AXIS_TOL`] of a bounding ray.
pub fn axis_violations(g: &ProjectionGraph, frame: &QuadrantFrame) -> Vec<usize> {
    let axes = frame.axes();
    (0..g.positions.len())
        .filter(|&v| {
            let d = g.positions[v] - frame.apex_pos;
            v != frame.apex
                && d != Point2::ORIGIN
                && axes
                    .iter()
                    .any(|&a| normalize_angle(d.angle() - a).abs() <= AXIS_TOL)
        })
        .collect()
}

/// Aligns the vertical axis with `gap_direction`, rotating it by the
/// smallest multiple of [`AXIS_STEP`] (alternating sign) that moves every
/// vertex off the axes while keeping the cone gap empty.
pub fn orient_axes(
    g: &ProjectionGraph,
    apex: usize,
    gap_direction: f64,
    delta_theta: f64,
) -> Result<QuadrantFrame, ForestError> {
    if !(0.0..FRAC_PI_2 / 2.0).contains(&delta_theta) {
        return Err(ForestError::BadSlant(delta_theta));
    }
    let base = QuadrantFrame::new(apex, g.positions[apex], gap_direction, delta_theta);
    if let Some(&v) = cone_violations(g, &base).first() {
        return Err(ForestError::NonEmptyCone { vertex: v });
    }
    let limit = if delta_theta > 0.0 { delta_theta / 4.0 } else { 1e-2 };
    let steps = (limit / AXIS_STEP).floor() as i64;
    for k in 0..=steps {
        for sign in [1.0, -1.0] {
            if k == 0 && sign < 0.0 {
                continue;
            }
            let frame = QuadrantFrame {
                axis_angle: gap_direction + sign * k as f64 * AXIS_STEP,
                ..base
            };
            if axis_violations(g, &frame).is_empty() && cone_violations(g, &frame).is_empty() {
                return Ok(frame);
            }
        }
    }
    Err(ForestError::CannotOrient { limit })
}

/// Grows θ-monotone paths in vertex-id order. From each vertex the step is
/// the incident edge inside the quadrant's wedge closest to the wedge
/// bisector, ties to the lower id; a path stops on the boundary or on a
/// vertex already in the forest.
pub fn grow_forest(g: &ProjectionGraph, frame: &QuadrantFrame) -> Result<CutForest, ForestError> {
    let mut forest = CutForest::default();
    for v in g.internal_vertices() {
        if forest.parent.contains_key(&v) {
            continue;
        }
        let quadrant = frame
            .quadrant_of_point(g.positions[v])
            .ok_or(ForestError::NonEmptyCone { vertex: v })?;
        let mut cur = v;
        loop {
            let next = step(g, frame, cur, quadrant).ok_or(ForestError::Stuck { vertex: cur, quadrant })?;
            forest.parent.insert(cur, next);
            forest.quadrant_of.insert(cur, quadrant);
            if !g.is_internal[next] {
                forest.roots.insert(next);
                break;
            }
            if let Some(&q) = forest.quadrant_of.get(&next) {
                if q != quadrant {
                    return Err(ForestError::QuadrantMismatch { vertex: next, from: quadrant, to: q });
                }
                break;
            }
            cur = next;
        }
    }
    Ok(forest)
}

fn step(g: &ProjectionGraph, frame: &QuadrantFrame, v: usize, quadrant: usize) -> Option<usize> {
    let bisector = frame.wedge_bisector(quadrant);
    let p = g.positions[v];
    g.neighbors[v]
        .iter()
        .filter_map(|&w| {
            let a = (g.positions[w] - p).angle();
            frame
                .in_wedge(quadrant, a)
                .then(|| (normalize_angle(a - bisector).abs(), w))
        })
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
        .map(|(_, w)| w)
}

/// Width of the smallest closed arc containing all `angles`.
pub fn covering_arc(angles: &[f64]) -> f64 {
    if angles.len() < 2 {
        return 0.0;
    }
    let mut a: Vec<f64> = angles.iter().map(|x| x.rem_euclid(TAU)).collect();
    a.sort_by(f64::total_cmp);
    let mut max_gap = a[0] + TAU - a[a.len() - 1];
    for w in a.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    TAU - max_gap
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneViolation {
    pub leaf: usize,
    pub path: Vec<usize>,
    pub arc: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub paths_checked: usize,
    pub violations: Vec<MonotoneViolation>,
}

impl MonotoneReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every leaf-to-root path has all step directions within one
/// closed arc of width `θ`.
pub fn verify_monotone(forest: &CutForest, g: &ProjectionGraph, frame: &QuadrantFrame) -> MonotoneReport {
    let children = forest.children();
    let limit = g.positions.len();
    let mut report = MonotoneReport::default();
    for &leaf in forest.parent.keys() {
        if children.contains_key(&leaf) {
            continue;
        }
        let path = forest.path_to_root(leaf, limit);
        let dirs: Vec<f64> = path
            .windows(2)
            .map(|w| (g.positions[w[1]] - g.positions[w[0]]).angle())
            .collect();
        let arc = covering_arc(&dirs);
        report.paths_checked += 1;
        if arc > frame.theta + 1e-9 {
            report.violations.push(MonotoneViolation { leaf, path, arc });
        }
    }
    report
}

/// Outcome of the structural forest checks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ForestReport {
    pub missing: Vec<usize>,
    pub cyclic: Vec<usize>,
    pub non_graph_edges: Vec<(usize, usize)>,
    pub off_quadrant: Vec<usize>,
    pub mixed_trees: Vec<(usize, usize)>,
    pub cone_violations: Vec<usize>,
    pub axis_violations: Vec<usize>,
    pub monotone: MonotoneReport,
}

impl ForestReport {
    pub fn violation_count(&self) -> usize {
        self.missing.len()
            + self.cyclic.len()
            + self.non_graph_edges.len()
            + self.off_quadrant.len()
            + self.mixed_trees.len()
            + self.cone_violations.len()
            + self.axis_violations.len()
            + self.monotone.violations.len()
    }

    pub fn passes(&self) -> bool {
        self.violation_count() == 0
    }
}

/// Spanning, acyclicity, graph-edge, in-quadrant, empty-cone, off-axis and
/// monotonicity checks.
pub fn check_forest(forest: &CutForest, g: &ProjectionGraph, frame: &QuadrantFrame) -> ForestReport {
    let n = g.positions.len();
    let internal = g.internal_vertices();
    let mut r = ForestReport {
        cone_violations: cone_violations(g, frame),
        axis_violations: axis_violations(g, frame),
        monotone: verify_monotone(forest, g, frame),
        ..Default::default()
    };
    for &v in &internal {
        if !forest.parent.contains_key(&v) {
            r.missing.push(v);
            continue;
        }
        let path = forest.path_to_root(v, n);
        let end = *path.last().unwrap_or(&v);
        if path.len() > n || g.is_internal[end] || !forest.roots.contains(&end) {
            r.cyclic.push(v);
        }
        if forest.quadrant_of.get(&v).copied() != frame.quadrant_of_point(g.positions[v]) {
            r.off_quadrant.push(v);
        }
    }
    for (c, p) in forest.edges() {
        if g.neighbors.get(c).is_none_or(|nb| nb.binary_search(&p).is_err()) {
            r.non_graph_edges.push((c, p));
        }
    }
    for t in forest.trees() {
        let q = forest.quadrant_of.get(&t.top);
        if t.vertices.iter().any(|v| forest.quadrant_of.get(v) != q) {
            r.mixed_trees.push((t.root, t.top));
        }
    }
    r
}

/// Apex selection, frame orientation and growth in one call.
pub fn build_forest(
    g: &ProjectionGraph,
    delta_theta: f64,
) -> Result<(ApexChoice, QuadrantFrame, CutForest), ForestError> {
    let apex = select_apex(g)?;
    let frame = orient_axes(g, apex.apex, apex.gap_direction, delta_theta)?;
    let forest = grow_forest(g, &frame)?;
    Ok((apex, frame, forest))
}
