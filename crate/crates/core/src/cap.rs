//! Triangulated convex caps: data model, validation, projection and
//! curvature.
//!
//! A cap is a triangulated disk in 3D whose boundary cycle lies in the plane
//! `z = 0` and bounds a convex polygon (the base), with every internal
//! vertex strictly above that plane. Triangles are counterclockwise when
//! viewed from `+z`, so every face normal points upward.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{orient2d, segments_intersect, signed_area2, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl std::ops::Sub for Point3 {
    type Output = Point3;

    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    pub fn xy(self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Angle between two 3D vectors, accurate for small and near-straight angles.
pub fn angle_between(u: Point3, v: Point3) -> f64 {
    u.cross(v).norm().atan2(u.dot(v))
}

/// Angle at corner `a` of triangle `(a, b, c)`.
pub fn corner_angle(a: Point3, b: Point3, c: Point3) -> f64 {
    angle_between(b - a, c - a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub vertices: Vec<Point3>,
    /// Counterclockwise (viewed from `+z`) vertex index triples.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary cycle, counterclockwise viewed from `+z`.
    pub boundary: Vec<usize>,
}

/// Tolerances used by [`validate_cap_with`]. Lengths are relative to the
/// boundary diameter.
#[derive(Debug, Clone, Copy)]
pub struct ValidationConfig {
    /// Every triangle angle must stay below `π/2 − acute_margin`.
    pub acute_margin: f64,
    pub planarity_tol: f64,
    /// Curvatures down to `−curvature_tol` are accepted as zero.
    pub curvature_tol: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            acute_margin: 1e-6,
            planarity_tol: 1e-9,
            curvature_tol: 1e-12,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapError {
    #[error("triangle {face} references vertex {index} (only {count} vertices)")]
    IndexOutOfRange { face: usize, index: usize, count: usize },
    #[error("triangle {0} repeats a vertex")]
    DegenerateTriangle(usize),
    #[error("edge ({a}, {b}) borders {count} triangles")]
    NonManifoldEdge { a: usize, b: usize, count: usize },
    #[error("edge ({a}, {b}) is used twice with the same orientation")]
    InconsistentOrientation { a: usize, b: usize },
    #[error("boundary cycle does not match the mesh's boundary edges: {0}")]
    BoundaryMismatch(String),
    #[error("boundary vertex {vertex} has z = {z:e}, off the base plane")]
    NonPlanarBoundary { vertex: usize, z: f64 },
    #[error("boundary is not convex at vertex {vertex}")]
    NonConvexBoundary { vertex: usize },
    #[error("boundary cycle is clockwise viewed from +z")]
    ClockwiseBoundary,
    #[error("internal vertex {vertex} has z = {z:e}, not above the base plane")]
    InternalNotAbove { vertex: usize, z: f64 },
    #[error("triangle {face} faces downward")]
    DownwardFace { face: usize },
    #[error("triangle {face} is not acute: angle {angle:.9} rad (worst face)")]
    NotAcute { face: usize, angle: f64 },
    #[error("internal vertex {vertex} has negative curvature {omega:e}")]
    NegativeCurvature { vertex: usize, omega: f64 },
    #[error("projected edges ({a0}, {a1}) and ({b0}, {b1}) cross")]
    CrossingEdges { a0: usize, a1: usize, b0: usize, b1: usize },
    #[error("cap has no triangles")]
    Empty,
}

/// Quantities derived from a valid cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapMetrics {
    /// Largest angle between a face normal and the z-axis.
    pub phi_max: f64,
    /// Curvature (angle deficit) of every internal vertex.
    pub omega: BTreeMap<usize, f64>,
    pub omega_total: f64,
    /// Slant `π/2 − (largest projected triangle angle)`: the widest cone gap
    /// for which every internal vertex has a step inside every wedge.
    pub delta_theta: f64,
    pub max_angle_3d: f64,
    pub max_angle_projected: f64,
    /// Set when some projected triangle is not strictly acute.
    pub projected_non_acute: bool,
    pub diameter: f64,
}

/// Mesh connectivity shared by the projection and the development.
#[derive(Debug, Clone)]
pub struct Topology {
    /// Directed edge `(a, b)` → (triangle, corner index of `a`).
    pub half_edges: HashMap<(usize, usize), (usize, usize)>,
    pub is_boundary_vertex: Vec<bool>,
    /// Unique undirected edges `(min, max)`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl Topology {
    pub fn face_of(&self, a: usize, b: usize) -> Option<usize> {
        self.half_edges.get(&(a, b)).map(|&(f, _)| f)
    }
}

impl Cap {
    pub fn internal_vertices(&self) -> Vec<usize> {
        let mut on = vec![false; self.vertices.len()];
        for &b in &self.boundary {
            on[b] = true;
        }
        (0..self.vertices.len()).filter(|&v| !on[v]).collect()
    }

    pub fn boundary_polygon(&self) -> Vec<Point2> {
        self.boundary.iter().map(|&i| self.vertices[i].xy()).collect()
    }

    pub fn face_points(&self, f: usize) -> [Point3; 3] {
        let t = self.triangles[f];
        [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.face_points(f);
        0.5 * (b - a).cross(c - a).norm()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len()).map(|f| self.face_area(f)).sum()
    }

    pub fn base_area(&self) -> f64 {
        0.5 * signed_area2(&self.boundary_polygon()).abs()
    }

    pub fn diameter(&self) -> f64 {
        let pts = self.boundary_polygon();
        let mut d: f64 = 0.0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                d = d.max(pts[i].dist(pts[j]));
            }
        }
        d
    }

    /// Builds connectivity, checking indices, manifoldness, orientation
    /// consistency and that `boundary` is exactly the cycle of boundary edges.
    pub fn topology(&self) -> Result<Topology, CapError> {
        if self.triangles.is_empty() {
            return Err(CapError::Empty);
        }
        let n = self.vertices.len();
        let mut half_edges = HashMap::with_capacity(3 * self.triangles.len());
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (f, t) in self.triangles.iter().enumerate() {
            for &i in t {
                if i >= n {
                    return Err(CapError::IndexOutOfRange { face: f, index: i, count: n });
                }
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(CapError::DegenerateTriangle(f));
            }
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if half_edges.insert((a, b), (f, k)).is_some() {
                    return Err(CapError::InconsistentOrientation { a, b });
                }
                *counts.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        for (&(a, b), &count) in &counts {
            if count > 2 {
                return Err(CapError::NonManifoldEdge { a, b, count });
            }
        }
        // Boundary half-edges, keyed by their start vertex.
        let mut next_on_boundary: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in half_edges.keys() {
            if !half_edges.contains_key(&(b, a)) && next_on_boundary.insert(a, b).is_some() {
                return Err(CapError::BoundaryMismatch(format!(
                    "vertex {a} starts two boundary edges"
                )));
            }
        }
        let m = self.boundary.len();
        if m < 3 || m != next_on_boundary.len() {
            return Err(CapError::BoundaryMismatch(format!(
                "boundary lists {m} vertices, mesh has {} boundary edges",
                next_on_boundary.len()
            )));
        }
        for i in 0..m {
            let (a, b) = (self.boundary[i], self.boundary[(i + 1) % m]);
            if next_on_boundary.get(&a) != Some(&b) {
                return Err(CapError::BoundaryMismatch(format!(
                    "({a}, {b}) is not a boundary edge in mesh orientation"
                )));
            }
        }
        let mut is_boundary_vertex = vec![false; n];
        for &b in &self.boundary {
            is_boundary_vertex[b] = true;
        }
        Ok(Topology {
            half_edges,
            is_boundary_vertex,
            edges: counts.into_keys().collect(),
        })
    }
}

/// Sum of incident 3D face angles at every vertex.
pub fn angle_sums(cap: &Cap) -> Vec<f64> {
    let mut sums = vec![0.0; cap.vertices.len()];
    for (f, t) in cap.triangles.iter().enumerate() {
        let p = cap.face_points(f);
        for k in 0..3 {
            sums[t[k]] += corner_angle(p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
        }
    }
    sums
}

/// Angle deficit `2π − Σ angles` at internal vertices, zero on the boundary.
pub fn vertex_curvatures(cap: &Cap) -> Vec<f64> {
    let sums = angle_sums(cap);
    let mut on_boundary = vec![false; cap.vertices.len()];
    for &b in &cap.boundary {
        on_boundary[b] = true;
    }
    sums.iter()
        .zip(on_boundary)
        .map(|(&s, b)| if b { 0.0 } else { TAU - s })
        .collect()
}

/// Planar straight-line projection of the cap onto `z = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionGraph {
    pub positions: Vec<Point2>,
    pub edges: Vec<(usize, usize)>,
    pub boundary: Vec<usize>,
    pub is_internal: Vec<bool>,
    /// Neighbors of every vertex, sorted by id.
    pub neighbors: Vec<Vec<usize>>,
}

impl ProjectionGraph {
    pub fn internal_vertices(&self) -> Vec<usize> {
        (0..self.positions.len()).filter(|&v| self.is_internal[v]).collect()
    }

    pub fn boundary_polygon(&self) -> Vec<Point2> {
        self.boundary.iter().map(|&i| self.positions[i]).collect()
    }
}

pub fn validate_cap(cap: &Cap) -> Result<CapMetrics, CapError> {
    validate_cap_with(cap, &ValidationConfig::default())
}

pub fn validate_cap_with(cap: &Cap, cfg: &ValidationConfig) -> Result<CapMetrics, CapError> {
    let topo = cap.topology()?;
    let diameter = cap.diameter();
    let scale = diameter.max(f64::MIN_POSITIVE);

    for &b in &cap.boundary {
        let z = cap.vertices[b].z;
        if z.abs() > cfg.planarity_tol * scale {
            return Err(CapError::NonPlanarBoundary { vertex: b, z });
        }
    }
    let poly = cap.boundary_polygon();
    if signed_area2(&poly) <= 0.0 {
        return Err(CapError::ClockwiseBoundary);
    }
    let m = poly.len();
    for i in 0..m {
        let (a, b, c) = (poly[i], poly[(i + 1) % m], poly[(i + 2) % m]);
        let turn = (b - a).cross(c - b) / ((b - a).norm() * (c - b).norm());
        if orient2d(a, b, c) < 0.0 && turn < -cfg.planarity_tol {
            return Err(CapError::NonConvexBoundary { vertex: cap.boundary[(i + 1) % m] });
        }
    }
    // A completely flat cap is the zero-curvature limit and is accepted.
    let internal = cap.internal_vertices();
    if !internal.iter().all(|&v| cap.vertices[v].z == 0.0) {
        for &v in &internal {
            let z = cap.vertices[v].z;
            if z <= 0.0 {
                return Err(CapError::InternalNotAbove { vertex: v, z });
            }
        }
    }

    let mut phi_max: f64 = 0.0;
    let mut worst: Option<(usize, f64)> = None;
    let mut max_angle_3d: f64 = 0.0;
    let mut max_angle_projected: f64 = 0.0;
    let mut angle_sum = vec![0.0; cap.vertices.len()];
    for (f, t) in cap.triangles.iter().enumerate() {
        let [a, b, c] = cap.face_points(f);
        let normal = (b - a).cross(c - a);
        if normal.z <= 0.0 {
            return Err(CapError::DownwardFace { face: f });
        }
        phi_max = phi_max.max(normal.x.hypot(normal.y).atan2(normal.z));
        let pts = [a, b, c];
        let flat = [
            Point3::new(a.x, a.y, 0.0),
            Point3::new(b.x, b.y, 0.0),
            Point3::new(c.x, c.y, 0.0),
        ];
        for k in 0..3 {
            let ang = corner_angle(pts[k], pts[(k + 1) % 3], pts[(k + 2) % 3]);
            angle_sum[t[k]] += ang;
            max_angle_3d = max_angle_3d.max(ang);
            if worst.is_none_or(|(_, w)| ang > w) {
                worst = Some((f, ang));
            }
            let proj = corner_angle(flat[k], flat[(k + 1) % 3], flat[(k + 2) % 3]);
            max_angle_projected = max_angle_projected.max(proj);
        }
    }
    if let Some((face, angle)) = worst {
        if angle >= FRAC_PI_2 - cfg.acute_margin {
            return Err(CapError::NotAcute { face, angle });
        }
    }

    let mut omega = BTreeMap::new();
    for v in cap.internal_vertices() {
        let w = TAU - angle_sum[v];
        if w < -cfg.curvature_tol {
            return Err(CapError::NegativeCurvature { vertex: v, omega: w });
        }
        omega.insert(v, w.max(0.0));
    }
    let omega_total = omega.values().sum();

    check_planar_embedding(cap, &topo)?;

    Ok(CapMetrics {
        phi_max,
        omega,
        omega_total,
        delta_theta: FRAC_PI_2 - max_angle_projected,
        max_angle_3d,
        max_angle_projected,
        projected_non_acute: max_angle_projected >= FRAC_PI_2 - cfg.acute_margin,
        diameter,
    })
}

/// Rejects projections in which two edges without a shared endpoint meet.
fn check_planar_embedding(cap: &Cap, topo: &Topology) -> Result<(), CapError> {
    let pos: Vec<Point2> = cap.vertices.iter().map(|p| p.xy()).collect();
    // Sweep over edges sorted by their left end.
    let mut order: Vec<(f64, f64, usize, usize)> = topo
        .edges
        .iter()
        .map(|&(a, b)| (pos[a].x.min(pos[b].x), pos[a].x.max(pos[b].x), a, b))
        .collect();
    order.sort_by(|p, q| p.0.total_cmp(&q.0));
    for i in 0..order.len() {
        let (_, hi, a0, a1) = order[i];
        for &(lo2, _, b0, b1) in &order[i + 1..] {
            if lo2 > hi {
                break;
            }
            if a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1 {
                continue;
            }
            if segments_intersect(pos[a0], pos[a1], pos[b0], pos[b1]) {
                return Err(CapError::CrossingEdges { a0, a1, b0, b1 });
            }
        }
    }
    Ok(())
}

/// Drops `z`. The cap should already be validated; planarity of the
/// straight-line embedding is re-checked.
pub fn project(cap: &Cap) -> Result<ProjectionGraph, CapError> {
    let topo = cap.topology()?;
    check_planar_embedding(cap, &topo)?;
    let n = cap.vertices.len();
    let mut neighbors = vec![Vec::new(); n];
    for &(a, b) in &topo.edges {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    for nb in &mut neighbors {
        nb.sort_unstable();
    }
    Ok(ProjectionGraph {
        positions: cap.vertices.iter().map(|p| p.xy()).collect(),
        edges: topo.edges,
        boundary: cap.boundary.clone(),
        is_internal: topo.is_boundary_vertex.iter().map(|&b| !b).collect(),
        neighbors,
    })
}

/// Verdicts on the curvature bounds the safe-edge argument relies on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub omega_total: f64,
    pub phi_max: f64,
    pub delta_theta: f64,
    /// `π·Φ²`.
    pub pi_phi_sq: f64,
    pub omega_below_pi_phi_sq: bool,
    /// `0.3·√Δθ`.
    pub phi_limit: f64,
    pub phi_within_limit: bool,
    /// `π·(0.3·√Δθ)² ≈ 0.28·Δθ`.
    pub omega_threshold: f64,
    pub omega_below_threshold: bool,
    /// Largest curvature sum over the cut trees, when known.
    pub max_tree_omega: Option<f64>,
    /// `2·Δθ`.
    pub tree_limit: f64,
    pub tree_within_limit: Option<bool>,
}

impl BoundsReport {
    pub fn passes(&self) -> bool {
        self.omega_below_pi_phi_sq
            && self.phi_within_limit
            && self.omega_below_threshold
            && self.tree_within_limit.unwrap_or(true)
    }
}

pub fn omega_threshold(delta_theta: f64) -> f64 {
    PI * 0.09 * delta_theta
}

/// Advisory check of `Ω < πΦ²`, `Φ ≤ 0.3√Δθ` (hence `Ω < 0.28·Δθ`), and,
/// given per-tree curvature sums, `ω_tree ≤ 2Δθ`.
pub fn curvature_bounds_check(
    metrics: &CapMetrics,
    delta_theta: f64,
    tree_omegas: Option<&[f64]>,
) -> BoundsReport {
    let pi_phi_sq = PI * metrics.phi_max * metrics.phi_max;
    let phi_limit = 0.3 * delta_theta.max(0.0).sqrt();
    let omega_threshold = omega_threshold(delta_theta);
    let max_tree_omega = tree_omegas.map(|t| t.iter().copied().fold(0.0, f64::max));
    let tree_limit = 2.0 * delta_theta;
    BoundsReport {
        omega_total: metrics.omega_total,
        phi_max: metrics.phi_max,
        delta_theta,
        pi_phi_sq,
        // A flat cap has Ω = Φ = 0; the strict bound is vacuous there.
        omega_below_pi_phi_sq: metrics.omega_total < pi_phi_sq || metrics.omega_total == 0.0,
        phi_limit,
        phi_within_limit: metrics.phi_max <= phi_limit,
        omega_threshold,
        omega_below_threshold: metrics.omega_total < omega_threshold || metrics.omega_total == 0.0,
        max_tree_omega,
        tree_limit,
        tree_within_limit: max_tree_omega.map(|m| m <= tree_limit),
    }
}
