use std::cmp::Ordering;

use super::point::Point2;

/// Exact sign of the orientation of `(a, b, c)`: positive when the triple
/// turns counterclockwise.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> f64 {
    robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    )
}

/// Convex hull by Andrew's monotone chain. Counterclockwise, no repeated
/// or collinear vertices; collinear input yields the two extreme points.
pub fn convex_hull_2d(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap_or(Ordering::Equal)
            .then(a.y.partial_cmp(&b.y).unwrap_or(Ordering::Equal))
    });
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut out = half_hull(pts.iter().copied());
    let mut upper = half_hull(pts.iter().rev().copied());
    out.pop();
    upper.pop();
    out.extend(upper);
    if out.len() == 2 && out[0] == out[1] {
        out.pop();
    }
    out
}

fn half_hull(pts: impl Iterator<Item = Point2>) -> Vec<Point2> {
    let mut chain: Vec<Point2> = Vec::new();
    for p in pts {
        while chain.len() >= 2 && orient2d(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 0.0 {
            chain.pop();
        }
        chain.push(p);
    }
    chain
}

/// Signed distance of `p` from the directed line `a→b`, positive on the left.
pub fn signed_line_distance(a: Point2, b: Point2, p: Point2) -> f64 {
    (b - a).cross(p - a) / a.dist(b)
}

/// True if `p` is inside or on the counterclockwise convex polygon `hull`,
/// allowing `tol` of outward slack per edge.
pub fn in_convex_polygon(hull: &[Point2], p: Point2, tol: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0].dist(p) <= tol,
        2 => segment_distance(hull[0], hull[1], p) <= tol,
        n => (0..n).all(|i| signed_line_distance(hull[i], hull[(i + 1) % n], p) >= -tol),
    }
}

pub fn segment_distance(a: Point2, b: Point2, p: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return a.dist(p);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (a + ab * t).dist(p)
}
