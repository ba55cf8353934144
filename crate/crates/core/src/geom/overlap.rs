//! Interior-overlap tests between simple polygons.
//!
//! Two polygons overlap when their interiors intersect by more than a
//! penetration tolerance. Shared edges and vertices are touching, not
//! overlap.

use super::hull::{orient2d, segment_distance, signed_line_distance};
use super::point::{signed_area2, Point2};
use super::GeomError;

/// Penetration depth below which two polygons are considered touching.
pub const DEFAULT_OVERLAP_TOL: f64 = 1e-9;

pub fn polygons_overlap(a: &[Point2], b: &[Point2]) -> Result<bool, GeomError> {
    polygons_overlap_with(a, b, DEFAULT_OVERLAP_TOL)
}

pub fn polygons_overlap_with(a: &[Point2], b: &[Point2], tol: f64) -> Result<bool, GeomError> {
    check_simple(a)?;
    check_simple(b)?;
    if is_convex(a) && is_convex(b) {
        return Ok(convex_penetration(a, b) > tol);
    }
    Ok(general_overlap(a, b, tol))
}

/// Minimum over separating-axis candidates of the projected interval
/// overlap. Positive means the convex polygons interpenetrate by that much;
/// zero or negative means they touch or are apart.
pub fn convex_penetration(a: &[Point2], b: &[Point2]) -> f64 {
    let mut depth = f64::INFINITY;
    for poly in [a, b] {
        let n = poly.len();
        for i in 0..n {
            let e = poly[(i + 1) % n] - poly[i];
            let len = e.norm();
            if len == 0.0 {
                continue;
            }
            let axis = e.perp() * (1.0 / len);
            let (amin, amax) = project(a, axis);
            let (bmin, bmax) = project(b, axis);
            let overlap = amax.min(bmax) - amin.max(bmin);
            depth = depth.min(overlap);
            if depth <= 0.0 {
                return depth;
            }
        }
    }
    depth
}

fn project(poly: &[Point2], axis: Point2) -> (f64, f64) {
    poly.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p.dot(axis);
        (lo.min(d), hi.max(d))
    })
}

pub fn is_convex(poly: &[Point2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let sign = signed_area2(poly).signum();
    (0..n).all(|i| orient2d(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) * sign >= 0.0)
}

/// Rejects polygons with fewer than three vertices, zero area, or
/// intersecting non-adjacent edges.
pub fn check_simple(poly: &[Point2]) -> Result<(), GeomError> {
    let n = poly.len();
    if n < 3 || poly.iter().any(|p| !p.is_finite()) || signed_area2(poly) == 0.0 {
        return Err(GeomError::NonSimplePolygon);
    }
    for i in 0..n {
        let (a0, a1) = (poly[i], poly[(i + 1) % n]);
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            let (b0, b1) = (poly[j], poly[(j + 1) % n]);
            if segments_intersect(a0, a1, b0, b1) {
                return Err(GeomError::NonSimplePolygon);
            }
        }
    }
    Ok(())
}

/// Closed-segment intersection with exact orientation signs.
pub fn segments_intersect(a0: Point2, a1: Point2, b0: Point2, b1: Point2) -> bool {
    let d1 = orient2d(b0, b1, a0);
    let d2 = orient2d(b0, b1, a1);
    let d3 = orient2d(a0, a1, b0);
    let d4 = orient2d(a0, a1, b1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Point2, q0: Point2, q1: Point2, o: f64| {
        o == 0.0
            && p.x >= q0.x.min(q1.x)
            && p.x <= q0.x.max(q1.x)
            && p.y >= q0.y.min(q1.y)
            && p.y <= q0.y.max(q1.y)
    };
    on(a0, b0, b1, d1) || on(a1, b0, b1, d2) || on(b0, a0, a1, d3) || on(b1, a0, a1, d4)
}

/// Depth of `p` inside `poly`: distance to the boundary when inside,
/// negative distance when outside.
fn inside_depth(poly: &[Point2], p: Point2) -> f64 {
    let n = poly.len();
    let mut winding = 0i32;
    let mut dist = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        dist = dist.min(segment_distance(a, b, p));
        if a.y <= p.y {
            if b.y > p.y && orient2d(a, b, p) > 0.0 {
                winding += 1;
            }
        } else if b.y <= p.y && orient2d(a, b, p) < 0.0 {
            winding -= 1;
        }
    }
    if winding != 0 {
        dist
    } else {
        -dist
    }
}

/// A point strictly inside a simple polygon: the centroid of an ear.
fn interior_point(poly: &[Point2]) -> Point2 {
    let n = poly.len();
    let ccw = signed_area2(poly) > 0.0;
    for i in 0..n {
        let (a, b, c) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
        let o = orient2d(a, b, c);
        if (ccw && o <= 0.0) || (!ccw && o >= 0.0) {
            continue;
        }
        let tri = [a, b, c];
        let blocked = poly.iter().enumerate().any(|(j, &q)| {
            j != i && j != (i + n - 1) % n && j != (i + 1) % n && inside_depth(&tri, q) >= 0.0
        });
        if !blocked {
            return (a + b + c) * (1.0 / 3.0);
        }
    }
    poly.iter().fold(Point2::ORIGIN, |s, &p| s + p) * (1.0 / n as f64)
}

fn general_overlap(a: &[Point2], b: &[Point2], tol: f64) -> bool {
    let (na, nb) = (a.len(), b.len());
    for i in 0..na {
        let (a0, a1) = (a[i], a[(i + 1) % na]);
        for j in 0..nb {
            let (b0, b1) = (b[j], b[(j + 1) % nb]);
            let d1 = orient2d(b0, b1, a0);
            let d2 = orient2d(b0, b1, a1);
            let d3 = orient2d(a0, a1, b0);
            let d4 = orient2d(a0, a1, b1);
            let proper = d1 * d2 < 0.0 && d3 * d4 < 0.0;
            if proper {
                let depth = signed_line_distance(b0, b1, a0)
                    .abs()
                    .min(signed_line_distance(b0, b1, a1).abs())
                    .min(signed_line_distance(a0, a1, b0).abs())
                    .min(signed_line_distance(a0, a1, b1).abs());
                if depth > tol {
                    return true;
                }
            }
        }
    }
    let probes = |p: &[Point2]| {
        let n = p.len();
        let mut v: Vec<Point2> = p.to_vec();
        v.extend((0..n).map(|i| p[i].lerp(p[(i + 1) % n], 0.5)));
        v.push(interior_point(p));
        v
    };
    probes(a).into_iter().any(|q| inside_depth(b, q) > tol)
        || probes(b).into_iter().any(|q| inside_depth(a, q) > tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn square(dx: f64, dy: f64) -> Vec<Point2> {
        vec![p(dx, dy), p(dx + 1.0, dy), p(dx + 1.0, dy + 1.0), p(dx, dy + 1.0)]
    }

    #[test]
    fn disjoint_and_identical_squares() {
        assert!(!polygons_overlap(&square(0.0, 0.0), &square(2.0, 0.0)).unwrap());
        assert!(polygons_overlap(&square(0.0, 0.0), &square(0.0, 0.0)).unwrap());
    }

    #[test]
    fn shared_edge_is_touching() {
        let t1 = [p(0.0, 0.0), p(1.0, 0.0), p(0.3, 0.8)];
        let t2 = [p(1.0, 0.0), p(0.0, 0.0), p(0.6, -0.7)];
        assert!(!polygons_overlap(&t1, &t2).unwrap());
        assert!(convex_penetration(&t1, &t2).abs() < 1e-15);
    }

    #[test]
    fn tiny_interpenetration_is_touching() {
        let a = square(0.0, 0.0);
        let b = square(1.0 - 1e-11, 0.0);
        assert!(!polygons_overlap(&a, &b).unwrap());
        let b = square(1.0 - 1e-6, 0.0);
        assert!(polygons_overlap(&a, &b).unwrap());
    }

    #[test]
    fn nonconvex_cases() {
        // An L-shape and a square sitting in its notch.
        let l = vec![
            p(0.0, 0.0),
            p(2.0, 0.0),
            p(2.0, 1.0),
            p(1.0, 1.0),
            p(1.0, 2.0),
            p(0.0, 2.0),
        ];
        assert!(!polygons_overlap(&l, &square(1.0, 1.0)).unwrap());
        assert!(polygons_overlap(&l, &square(0.5, 0.5)).unwrap());
        assert!(polygons_overlap(&l, &l).unwrap());
        assert!(polygons_overlap(&l, &square(0.2, 1.2)).unwrap());
    }

    #[test]
    fn non_simple_rejected() {
        let bowtie = [p(0.0, 0.0), p(1.0, 1.0), p(1.0, 0.0), p(0.0, 1.0)];
        assert!(matches!(
            polygons_overlap(&bowtie, &square(0.0, 0.0)),
            Err(GeomError::NonSimplePolygon)
        ));
        assert!(polygons_overlap(&[p(0.0, 0.0), p(1.0, 0.0)], &square(0.0, 0.0)).is_err());
    }
}
