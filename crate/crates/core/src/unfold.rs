//! Isometric development of a cap cut along a forest.
//!
//! Every internal vertex carries at least one cut edge, so the faces joined
//! by uncut (fold) edges form a tree and the development is unique up to a
//! rigid motion. Each cut tree opens a gap at its root; the two developed
//! copies of the root differ by the composition of the rotations about the
//! tree's vertices.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cap::{vertex_curvatures, Cap, CapError, Point3};
use crate::forest::{CutForest, Tree};
use crate::geom::{
    cg_center, cg_error_bound, compose, polygons_overlap_with, GeomError, Point2, Rigid2, Rotation,
    RotationSeq,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnfoldError {
    #[error(transparent)]
    Cap(#[from] CapError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("cut set disconnects the faces: {unplaced} faces unreachable from the root face")]
    DisconnectedDual { unplaced: usize },
    #[error("boundary edge index {0} out of range")]
    BadEdge(usize),
    #[error("vertex {0} is not a forest root")]
    NotARoot(usize),
    #[error("tree ({root}, {top}) has zero total curvature; its gap is null")]
    Degenerate { root: usize, top: usize },
    #[error("walk around tree ({root}, {top}) did not close")]
    OpenTour { root: usize, top: usize },
}

/// Developed copies of a root vertex on both sides of one cut edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSegment {
    pub root: usize,
    pub top: usize,
    /// Copy in the face holding the half-edge `root → top`.
    pub v: Point2,
    /// Copy in the face holding the half-edge `top → root`.
    pub v_prime: Point2,
    pub v_face: usize,
    pub v_prime_face: usize,
}

impl GapSegment {
    pub fn length(&self) -> f64 {
        self.v.dist(self.v_prime)
    }
}

#[derive(Debug, Clone)]
pub struct Development {
    pub root_face: usize,
    /// Developed corners of every face, in the order of `cap.triangles`.
    pub faces: Vec<[Point2; 3]>,
    /// Motion from each face's intrinsic frame into the plane.
    pub placement: Vec<Rigid2>,
    /// Breadth-first depth of each face in the fold tree.
    pub depth: Vec<usize>,
    pub parent_face: Vec<Option<usize>>,
    /// Closed outline of the cut disk, interior on the left.
    pub boundary_polyline: Vec<Point2>,
    /// `(vertex, face)` of every polyline point.
    pub boundary_corners: Vec<(usize, usize)>,
    pub gap_segments: Vec<GapSegment>,
    /// Cut edge `(min, max)` → its copy in each incident face, endpoints in
    /// `(min, max)` order.
    pub cut_edge_copies: BTreeMap<(usize, usize), [[Point2; 2]; 2]>,
    pub half_edges: HashMap<(usize, usize), (usize, usize)>,
    pub diameter: f64,
}

impl Development {
    /// Developed position of vertex `v` as a corner of face `f`.
    pub fn corner(&self, triangles: &[[usize; 3]], f: usize, v: usize) -> Option<Point2> {
        triangles[f].iter().position(|&x| x == v).map(|k| self.faces[f][k])
    }

    pub fn area(&self) -> f64 {
        self.faces
            .iter()
            .map(|[a, b, c]| 0.5 * (*b - *a).cross(*c - *a))
            .sum()
    }

    /// Developed endpoints of boundary edge `(boundary[i], boundary[i+1])`.
    pub fn boundary_edge(&self, cap: &Cap, i: usize) -> Option<(Point2, Point2)> {
        let m = cap.boundary.len();
        let (a, b) = (cap.boundary[i % m], cap.boundary[(i + 1) % m]);
        let &(f, k) = self.half_edges.get(&(a, b))?;
        Some((self.faces[f][k], self.faces[f][(k + 1) % 3]))
    }

    pub fn is_fold(&self, forest: &CutForest, a: usize, b: usize) -> bool {
        self.half_edges.contains_key(&(a, b))
            && self.half_edges.contains_key(&(b, a))
            && !forest.is_cut_edge(a, b)
    }
}

/// Corners of face `f` in its own frame: first at the origin, second on
/// the positive x-axis, third above.
fn intrinsic(p: [Point3; 3]) -> [Point2; 3] {
    let ab = p[0].dist(p[1]);
    let ac = p[0].dist(p[2]);
    let bc = p[1].dist(p[2]);
    let x = (ab * ab + ac * ac - bc * bc) / (2.0 * ab);
    let y = (ac * ac - x * x).max(0.0).sqrt();
    [Point2::ORIGIN, Point2::new(ab, 0.0), Point2::new(x, y)]
}

/// Develops the cap cut along `forest`. The root face holds boundary edge
/// `root_edge` (index into `cap.boundary`), which is placed exactly at its
/// 3D position; without one, face 0 is placed with its first edge at its
/// projected position and direction.
pub fn develop(cap: &Cap, forest: &CutForest, root_edge: Option<usize>) -> Result<Development, UnfoldError> {
    let topo = cap.topology()?;
    let nf = cap.triangles.len();
    let m = cap.boundary.len();
    let local: Vec<[Point2; 3]> = (0..nf).map(|f| intrinsic(cap.face_points(f))).collect();

    let (root_face, root_corner) = match root_edge {
        Some(i) if i < m => {
            let (a, b) = (cap.boundary[i], cap.boundary[(i + 1) % m]);
            topo.half_edges[&(a, b)]
        }
        Some(i) => return Err(UnfoldError::BadEdge(i)),
        None => (0, 0),
    };

    let mut placement = vec![Rigid2::IDENTITY; nf];
    let mut placed = vec![false; nf];
    let mut depth = vec![0usize; nf];
    let mut parent_face = vec![None; nf];

    // Root: its edge at corner `root_corner` goes to the projected position.
    let t = cap.triangles[root_face];
    let (k0, k1) = (root_corner, (root_corner + 1) % 3);
    let (a, b) = (cap.vertices[t[k0]].xy(), cap.vertices[t[k1]].xy());
    let len = local[root_face][k0].dist(local[root_face][k1]);
    let target_b = a + (b - a).normalized() * len;
    placement[root_face] = Rigid2::from_segments(local[root_face][k0], local[root_face][k1], a, target_b);
    placed[root_face] = true;

    let mut queue = VecDeque::from([root_face]);
    while let Some(f) = queue.pop_front() {
        let t = cap.triangles[f];
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if forest.is_cut_edge(a, b) {
                continue;
            }
            let Some(&(g, kg)) = topo.half_edges.get(&(b, a)) else {
                continue;
            };
            if placed[g] {
                continue;
            }
            // In g the edge runs b → a; match it to f's developed copy.
            let pa = placement[f].apply(local[f][k]);
            let pb = placement[f].apply(local[f][(k + 1) % 3]);
            placement[g] = Rigid2::from_segments(local[g][kg], local[g][(kg + 1) % 3], pb, pa);
            placed[g] = true;
            depth[g] = depth[f] + 1;
            parent_face[g] = Some(f);
            queue.push_back(g);
        }
    }
    let unplaced = placed.iter().filter(|&&p| !p).count();
    if unplaced > 0 {
        return Err(UnfoldError::DisconnectedDual { unplaced });
    }

    let faces: Vec<[Point2; 3]> = (0..nf)
        .map(|f| local[f].map(|p| placement[f].apply(p)))
        .collect();

    let mut cut_edge_copies = BTreeMap::new();
    for (c, p) in forest.edges() {
        let (lo, hi) = (c.min(p), c.max(p));
        let copy = |from: usize, to: usize| {
            topo.half_edges.get(&(from, to)).map(|&(f, k)| {
                let (x, y) = (faces[f][k], faces[f][(k + 1) % 3]);
                if from == lo {
                    [x, y]
                } else {
                    [y, x]
                }
            })
        };
        if let (Some(x), Some(y)) = (copy(lo, hi), copy(hi, lo)) {
            cut_edge_copies.insert((lo, hi), [x, y]);
        }
    }

    let mut gap_segments = Vec::new();
    for tree in forest.trees() {
        let (r, c) = (tree.root, tree.top);
        if let (Some(&(f1, k1)), Some(&(f2, k2))) =
            (topo.half_edges.get(&(r, c)), topo.half_edges.get(&(c, r)))
        {
            gap_segments.push(GapSegment {
                root: r,
                top: c,
                v: faces[f1][k1],
                v_prime: faces[f2][(k2 + 1) % 3],
                v_face: f1,
                v_prime_face: f2,
            });
        }
    }

    let mut dev = Development {
        root_face,
        faces,
        placement,
        depth,
        parent_face,
        boundary_polyline: Vec::new(),
        boundary_corners: Vec::new(),
        gap_segments,
        cut_edge_copies,
        half_edges: topo.half_edges,
        diameter: cap.diameter(),
    };
    trace_outline(cap, forest, &mut dev);
    Ok(dev)
}

/// Next half-edge out of `b` after arriving along `a → b` in face `f`,
/// turning clockwise about `b`: `(face, b, y)`.
fn next_out(cap: &Cap, f: usize, b: usize) -> (usize, usize) {
    let t = cap.triangles[f];
    let k = t.iter().position(|&x| x == b).unwrap_or(0);
    (k, t[(k + 1) % 3])
}

fn trace_outline(cap: &Cap, forest: &CutForest, dev: &mut Development) {
    let on_outline = |a: usize, b: usize| {
        !dev.half_edges.contains_key(&(b, a)) || forest.is_cut_edge(a, b)
    };
    let m = cap.boundary.len();
    let start = (cap.boundary[0], cap.boundary[1 % m]);
    let Some(&(mut f, _)) = dev.half_edges.get(&start) else {
        return;
    };
    let mut b = start.1;
    let limit = 6 * cap.triangles.len() + 6;
    for _ in 0..limit {
        let (k, y) = next_out(cap, f, b);
        if on_outline(b, y) {
            dev.boundary_corners.push((b, f));
            dev.boundary_polyline.push(dev.faces[f][k]);
            let prev = b;
            b = y;
            if (prev, b) == start {
                break;
            }
        } else {
            // Cross the fold (b, y) into the face holding y → b.
            f = dev.half_edges[&(y, b)].0;
        }
    }
    // Rotate so the outline starts at the copy of boundary[0] reached first.
    if let Some(last) = dev.boundary_polyline.pop() {
        dev.boundary_polyline.insert(0, last);
        let c = dev.boundary_corners.pop().unwrap_or((0, 0));
        dev.boundary_corners.insert(0, c);
    }
}

/// Map `(root, top)` → `(v, v′)` for every tree.
pub fn gap_segments(dev: &Development, forest: &CutForest) -> BTreeMap<(usize, usize), (Point2, Point2)> {
    let trees: BTreeSet<(usize, usize)> = forest.trees().iter().map(|t| (t.root, t.top)).collect();
    dev.gap_segments
        .iter()
        .filter(|g| trees.contains(&(g.root, g.top)))
        .map(|g| ((g.root, g.top), (g.v, g.v_prime)))
        .collect()
}

/// Rotations met on a walk around one tree, starting beside the root on the
/// `v` side and ending on the `v′` side.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeTour {
    pub root: usize,
    pub top: usize,
    /// Tree vertices in first-visit order.
    pub vertices: Vec<usize>,
    pub rotations: RotationSeq,
    pub v: Point2,
    pub v_prime: Point2,
}

/// Walks clockwise around every tree vertex in turn, recording each
/// vertex's curvature and its developed position where the walk first
/// reaches it. Composing the rotations in that order maps `v` onto `v′`.
pub fn tree_tour(cap: &Cap, dev: &Development, forest: &CutForest, tree: &Tree) -> Result<TreeTour, UnfoldError> {
    let omega = vertex_curvatures(cap);
    let (r, c) = (tree.root, tree.top);
    let &(f1, k1) = dev.half_edges.get(&(r, c)).ok_or(UnfoldError::OpenTour { root: r, top: c })?;
    let v = dev.faces[f1][k1];
    let mut f = f1;
    let mut b = c;
    let mut seen = BTreeSet::from([c]);
    let mut order = vec![c];
    let mut items = vec![Rotation::new(omega[c].max(0.0), dev.faces[f1][(k1 + 1) % 3])];
    let limit = 6 * cap.triangles.len() + 6;
    for _ in 0..limit {
        let (k, y) = next_out(cap, f, b);
        if forest.is_cut_edge(b, y) {
            if y == r {
                let v_prime = dev.faces[f][(k + 1) % 3];
                return Ok(TreeTour {
                    root: r,
                    top: c,
                    vertices: order,
                    rotations: RotationSeq::new(items)?,
                    v,
                    v_prime,
                });
            }
            if seen.insert(y) {
                order.push(y);
                items.push(Rotation::new(omega[y].max(0.0), dev.faces[f][(k + 1) % 3]));
            }
            b = y;
        } else {
            let &(g, _) = dev
                .half_edges
                .get(&(y, b))
                .ok_or(UnfoldError::OpenTour { root: r, top: c })?;
            f = g;
        }
    }
    Err(UnfoldError::OpenTour { root: r, top: c })
}

/// Distance between `v′` and the image of `v` under the composed tour.
pub fn gap_closure_error(tour: &TreeTour) -> Result<f64, UnfoldError> {
    let motion = compose(&tour.rotations)?;
    Ok(motion.apply(tour.v).dist(tour.v_prime))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeCenterReport {
    pub root: usize,
    pub top: usize,
    /// Fixed point of the composed tour.
    pub center: Point2,
    /// Curvature-weighted average of the tour's centers.
    pub cg: Point2,
    /// Direction of `v → v′`.
    pub gap_angle: f64,
    pub gap_length: f64,
    pub omega_total: f64,
    pub cg_error: f64,
    pub cg_bound: f64,
    pub closure_error: f64,
    pub vertices: Vec<usize>,
    pub v: Point2,
    pub v_prime: Point2,
}

impl CompositeCenterReport {
    /// `|center − cg| ≤ slack·bound`, plus `floor` for the rounding of a
    /// fixed point under a tiny total angle.
    pub fn within_cg_bound(&self, slack: f64, floor: f64) -> bool {
        self.cg_error <= slack * self.cg_bound + floor
    }
}

pub fn tree_center(cap: &Cap, dev: &Development, forest: &CutForest, tree: &Tree) -> Result<CompositeCenterReport, UnfoldError> {
    let tour = tree_tour(cap, dev, forest, tree)?;
    let omega_total = tour.rotations.total_angle();
    if omega_total <= 0.0 {
        return Err(UnfoldError::Degenerate { root: tree.root, top: tree.top });
    }
    let motion = compose(&tour.rotations)?;
    let center = motion
        .fixed_point()
        .map_err(|_| UnfoldError::Degenerate { root: tree.root, top: tree.top })?;
    let cg = cg_center(&tour.rotations)?;
    Ok(CompositeCenterReport {
        root: tree.root,
        top: tree.top,
        center,
        cg,
        gap_angle: (tour.v_prime - tour.v).angle(),
        gap_length: tour.v.dist(tour.v_prime),
        omega_total,
        cg_error: center.dist(cg),
        cg_bound: cg_error_bound(&tour.rotations),
        closure_error: motion.apply(tour.v).dist(tour.v_prime),
        vertices: tour.vertices,
        v: tour.v,
        v_prime: tour.v_prime,
    })
}

/// Composite centers of every tree incident to `root`.
pub fn composite_center(
    cap: &Cap,
    dev: &Development,
    forest: &CutForest,
    root: usize,
) -> Result<Vec<CompositeCenterReport>, UnfoldError> {
    if !forest.roots.contains(&root) {
        return Err(UnfoldError::NotARoot(root));
    }
    forest
        .trees()
        .iter()
        .filter(|t| t.root == root)
        .map(|t| tree_center(cap, dev, forest, t))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetCheck {
    pub simple: bool,
    pub first_overlap: Option<(usize, usize)>,
    pub pairs_tested: usize,
}

/// Pairwise interior-overlap test of the developed faces. Faces sharing a
/// fold edge are exempt. `tol` is absolute.
pub fn check_net_simple(dev: &Development, tol: f64) -> NetCheck {
    let nf = dev.faces.len();
    let mut adjacent: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (g, p) in dev.parent_face.iter().enumerate() {
        if let Some(f) = *p {
            adjacent.insert((f.min(g), f.max(g)));
        }
    }
    let mut boxes: Vec<(f64, f64, f64, f64, usize)> = (0..nf)
        .map(|f| {
            let t = dev.faces[f];
            let (xs, ys) = (t.map(|p| p.x), t.map(|p| p.y));
            (
                xs.iter().copied().fold(f64::INFINITY, f64::min),
                xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                ys.iter().copied().fold(f64::INFINITY, f64::min),
                ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                f,
            )
        })
        .collect();
    boxes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.4.cmp(&b.4)));
    let mut pairs_tested = 0;
    let mut first: Option<(usize, usize)> = None;
    for i in 0..nf {
        let (_, hi, ylo, yhi, f) = boxes[i];
        for &(lo2, _, ylo2, yhi2, g) in &boxes[i + 1..] {
            if lo2 > hi + tol {
                break;
            }
            if ylo2 > yhi + tol || ylo > yhi2 + tol {
                continue;
            }
            let key = (f.min(g), f.max(g));
            if adjacent.contains(&key) {
                continue;
            }
            pairs_tested += 1;
            if polygons_overlap_with(&dev.faces[f], &dev.faces[g], tol).unwrap_or(true)
                && first.is_none_or(|p| key < p)
            {
                first = Some(key);
            }
        }
    }
    NetCheck {
        simple: first.is_none(),
        first_overlap: first,
        pairs_tested,
    }
}

/// Worst deviations of a development from its cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DevelopmentReport {
    pub max_side_error: f64,
    pub max_fold_error: f64,
    pub max_cut_length_error: f64,
    pub developed_area: f64,
    pub surface_area: f64,
    pub relative_area_error: f64,
}

impl DevelopmentReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_side_error <= tol
            && self.max_fold_error <= tol
            && self.max_cut_length_error <= tol
            && self.relative_area_error <= tol
    }
}

pub fn check_development(cap: &Cap, dev: &Development, forest: &CutForest) -> DevelopmentReport {
    let mut side: f64 = 0.0;
    for (f, t) in cap.triangles.iter().enumerate() {
        for k in 0..3 {
            let d3 = cap.vertices[t[k]].dist(cap.vertices[t[(k + 1) % 3]]);
            let d2 = dev.faces[f][k].dist(dev.faces[f][(k + 1) % 3]);
            side = side.max((d3 - d2).abs());
        }
    }
    let mut fold: f64 = 0.0;
    for (&(a, b), &(f, k)) in &dev.half_edges {
        if a < b && dev.is_fold(forest, a, b) {
            let (g, kg) = dev.half_edges[&(b, a)];
            let e1 = (dev.faces[f][k], dev.faces[f][(k + 1) % 3]);
            let e2 = (dev.faces[g][(kg + 1) % 3], dev.faces[g][kg]);
            fold = fold.max(e1.0.dist(e2.0)).max(e1.1.dist(e2.1));
        }
    }
    let cut = dev
        .cut_edge_copies
        .values()
        .map(|[x, y]| (x[0].dist(x[1]) - y[0].dist(y[1])).abs())
        .fold(0.0, f64::max);
    let developed_area = dev.area();
    let surface_area = cap.surface_area();
    DevelopmentReport {
        max_side_error: side,
        max_fold_error: fold,
        max_cut_length_error: cut,
        developed_area,
        surface_area,
        relative_area_error: (developed_area - surface_area).abs() / surface_area,
    }
}
