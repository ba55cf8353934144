//! Seeded cap generators and the adversarial dodecagon scene.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cap::{validate_cap, Cap, CapError, Point3};
use crate::geom::{GeomError, Point2, Rotation, RotationSeq};

pub const MIN_SIDES: usize = 5;
pub const MAX_SIDES: usize = 16;
const RETRIES: usize = 32;
/// Largest projected triangle angle accepted from the jittered mesh.
const MAX_PROJECTED_ANGLE: f64 = 85.0 * PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    pub n_target: usize,
    pub phi_max: f64,
    pub boundary_sides: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            seed: 1,
            n_target: 100,
            phi_max: 0.05,
            boundary_sides: 12,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no ring count gives an internal vertex count within 2x of {n_target} (closest {closest})")]
    CountOutOfRange { n_target: usize, closest: usize },
    #[error("generation failed after {attempts} attempts: {last}")]
    Failed { attempts: usize, last: CapError },
    #[error("generated projection too obtuse: max angle {0:.6} rad")]
    TooObtuse(f64),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Ring ratio minimizing the largest angle of the zigzag strip between two
/// concentric `m`-gons rotated by half a step.
fn ring_ratio(m: usize) -> f64 {
    let strip_max = |k: f64| {
        let d = TAU / m as f64;
        let o0 = Point2::from_angle(0.0);
        let o1 = Point2::from_angle(d);
        let im = Point2::from_angle(-0.5 * d) * k;
        let i0 = Point2::from_angle(0.5 * d) * k;
        let i1 = Point2::from_angle(1.5 * d) * k;
        max_angle(&[o0, o1, i0]).max(max_angle(&[im, o0, i0])).max(max_angle(&[i0, o1, i1]))
    };
    // Golden-section search; the strip's max angle is unimodal in k.
    let (mut lo, mut hi) = (0.05, 0.95);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if strip_max(a) < strip_max(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}

fn max_angle(t: &[Point2; 3]) -> f64 {
    (0..3)
        .map(|k| {
            let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let (u, v) = (b - a, c - a);
            u.cross(v).abs().atan2(u.dot(v))
        })
        .fold(0.0, f64::max)
}

fn ring_count(m: usize, n_target: usize) -> Result<usize, GenError> {
    let ratio = |k: usize| {
        let n = (m * k + 1) as f64;
        (n / n_target.max(1) as f64).ln().abs()
    };
    let best = (0..=(n_target / m + 2)).min_by(|&a, &b| ratio(a).total_cmp(&ratio(b))).unwrap_or(0);
    if ratio(best) > 2f64.ln() + 1e-12 {
        return Err(GenError::CountOutOfRange {
            n_target,
            closest: m * best + 1,
        });
    }
    Ok(best)
}

/// Generates a convex cap over a regular `boundary_sides`-gon inscribed in
/// the unit circle. The planar mesh is a stack of concentric rings closed by
/// a center fan, jittered per seed and lifted onto the paraboloid
/// `z = ε(1 − |p|²)` with `ε` chosen so the steepest face tilts by exactly
/// `phi_max`. Points on a downward paraboloid over an acute (hence
/// Delaunay) triangulation form a convex surface.
pub fn generate_cap(params: &GenParams) -> Result<Cap, GenError> {
    let m = params.boundary_sides;
    if !(MIN_SIDES..=MAX_SIDES).contains(&m) {
        return Err(GenError::InvalidParams(format!(
            "boundary_sides must be in {MIN_SIDES}..={MAX_SIDES}, got {m}"
        )));
    }
    if !(params.phi_max > 0.0 && params.phi_max <= 0.5) {
        return Err(GenError::InvalidParams(format!(
            "phi_max must be in (0, 0.5], got {}",
            params.phi_max
        )));
    }
    let rings = ring_count(m, params.n_target)?;
    let kappa = ring_ratio(m);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let rotation = rng.random_range(0.0..TAU);
    let base = ring_mesh(m, rings, kappa, rotation);

    let mut jitter = 0.25;
    let mut last = None;
    for attempt in 0..RETRIES {
        let amount = if attempt + 1 == RETRIES { 0.0 } else { jitter };
        let planar = jittered(&base, m, rings, kappa, amount, &mut rng);
        let cap = lift(&planar, m, params.phi_max);
        match validate_cap(&cap) {
            Ok(metrics) if metrics.max_angle_projected <= MAX_PROJECTED_ANGLE => return Ok(cap),
            Ok(metrics) => {
                if amount == 0.0 {
                    return Err(GenError::TooObtuse(metrics.max_angle_projected));
                }
            }
            Err(e) => last = Some(e),
        }
        jitter *= 0.5;
    }
    Err(GenError::Failed {
        attempts: RETRIES,
        last: last.unwrap_or(CapError::Empty),
    })
}

struct PlanarMesh {
    points: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
}

fn ring_mesh(m: usize, rings: usize, kappa: f64, rotation: f64) -> PlanarMesh {
    let step = TAU / m as f64;
    let mut points = Vec::with_capacity(m * (rings + 1) + 1);
    for j in 0..=rings {
        let r = kappa.powi(j as i32);
        for i in 0..m {
            let a = rotation + step * (i as f64 + 0.5 * j as f64);
            points.push(Point2::from_angle(a) * r);
        }
    }
    let center = points.len();
    points.push(Point2::ORIGIN);
    let id = |j: usize, i: usize| j * m + i % m;
    let mut triangles = Vec::with_capacity(2 * m * rings + m);
    for j in 0..rings {
        for i in 0..m {
            triangles.push([id(j, i), id(j, i + 1), id(j + 1, i)]);
            triangles.push([id(j + 1, i), id(j, i + 1), id(j + 1, i + 1)]);
        }
    }
    for i in 0..m {
        triangles.push([id(rings, i), id(rings, i + 1), center]);
    }
    PlanarMesh { points, triangles }
}

fn jittered(
    base: &PlanarMesh,
    m: usize,
    rings: usize,
    kappa: f64,
    amount: f64,
    rng: &mut ChaCha8Rng,
) -> PlanarMesh {
    let mut points = base.points.clone();
    let center = points.len() - 1;
    for (v, p) in points.iter_mut().enumerate().skip(m) {
        let ring = if v == center { rings + 1 } else { v / m };
        let scale = kappa.powi(ring as i32 - 1) * (1.0 - kappa) * (PI / m as f64).min(0.5);
        let r = amount * scale * rng.random::<f64>().sqrt();
        let a = rng.random_range(0.0..TAU);
        *p += Point2::from_angle(a) * r;
    }
    PlanarMesh {
        points,
        triangles: base.triangles.clone(),
    }
}

fn lift(mesh: &PlanarMesh, m: usize, phi_max: f64) -> Cap {
    let height = |p: Point2| 1.0 - p.norm_sq();
    // Gradient of the affine interpolant of the unit-ε height on each face.
    let max_grad = mesh
        .triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| mesh.points[i]);
            let (u, v) = (b - a, c - a);
            let (hu, hv) = (height(b) - height(a), height(c) - height(a));
            let det = u.cross(v);
            let gx = (hu * v.y - hv * u.y) / det;
            let gy = (u.x * hv - v.x * hu) / det;
            gx.hypot(gy)
        })
        .fold(0.0, f64::max);
    let eps = phi_max.tan() / max_grad;
    let vertices = mesh
        .points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let z = if i < m { 0.0 } else { eps * height(p) };
            Point3::new(p.x, p.y, z)
        })
        .collect();
    Cap {
        vertices,
        triangles: mesh.triangles.clone(),
        boundary: (0..m).collect(),
    }
}

/// Parameters of the adversarial scene: a regular `n_gon`, every cut a
/// single segment meeting the boundary at `cut_angle`, all cut vertices of
/// curvature `omega` except the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversarialScene {
    pub n_gon: usize,
    pub omega: f64,
    pub cut_angle: f64,
}

impl AdversarialScene {
    pub fn new(n_gon: usize, omega: f64) -> Self {
        Self {
            n_gon,
            omega,
            cut_angle: 5f64.to_radians(),
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n_gon < 3 {
            return Err(GenError::InvalidParams(format!("n_gon must be ≥ 3, got {}", self.n_gon)));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(GenError::InvalidParams(format!("omega must be > 0, got {}", self.omega)));
        }
        if self.n_gon as f64 * self.omega >= TAU {
            return Err(GenError::InvalidParams(format!(
                "total curvature {}·{} must stay below 2π",
                self.n_gon, self.omega
            )));
        }
        if !(self.cut_angle > 0.0 && self.cut_angle < FRAC_PI_2) {
            return Err(GenError::InvalidParams(format!(
                "cut_angle must be in (0, π/2), got {}",
                self.cut_angle
            )));
        }
        Ok(())
    }
}

/// A cut path in a planar scene, ending at boundary vertex `root`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTree {
    pub root: usize,
    /// Internal vertices from the far end to the one adjacent to the root.
    pub path: Vec<Point2>,
    pub omegas: Vec<f64>,
}

impl SceneTree {
    pub fn rotations(&self) -> Result<RotationSeq, GeomError> {
        RotationSeq::new(
            self.path
                .iter()
                .zip(&self.omegas)
                .map(|(&p, &w)| Rotation::new(w, p))
                .collect(),
        )
    }
}

/// Planar scene: a convex polygon (counterclockwise) and its cut trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene2d {
    pub polygon: Vec<Point2>,
    pub trees: Vec<SceneTree>,
}

/// Regular polygon of circumradius 1 with edge `(0, 1)` on top and
/// horizontal, vertices counterclockwise.
pub fn regular_polygon(n: usize) -> Vec<Point2> {
    let start = FRAC_PI_2 - PI / n as f64;
    (0..n)
        .map(|k| Point2::from_angle(start + TAU * k as f64 / n as f64))
        .collect()
}

/// Builds the adversarial scene. Every boundary vertex `P_k` is the root of
/// a cut segment lying alongside the preceding edge `P_{k-1} P_k` at the
/// shallow `cut_angle`; the segment's inner end carries curvature `omega`.
/// The tree at `P_0` is instead a 2-path from the center, whose curvature
/// is zero.
pub fn generate_counterexample(scene: &AdversarialScene) -> Result<Scene2d, GenError> {
    scene.validate()?;
    let n = scene.n_gon;
    let polygon = regular_polygon(n);
    let side = polygon[0].dist(polygon[1]);
    let reach = 0.4 * side;
    let trees = (0..n)
        .map(|k| {
            let p = polygon[k];
            let prev = polygon[(k + n - 1) % n];
            let along = (p - prev).normalized();
            let inner = p - along.rotated(-scene.cut_angle) * reach;
            if k == 0 {
                SceneTree {
                    root: k,
                    path: vec![Point2::ORIGIN, inner],
                    omegas: vec![0.0, scene.omega],
                }
            } else {
                SceneTree {
                    root: k,
                    path: vec![inner],
                    omegas: vec![scene.omega],
                }
            }
        })
        .collect();
    Ok(Scene2d { polygon, trees })
}
