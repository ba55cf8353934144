use serde::{Deserialize, Serialize};

use super::point::{normalize_angle, Point2};
use super::GeomError;

/// Default angle below which a motion is treated as a pure translation.
pub const DEFAULT_TRANSLATION_THRESHOLD: f64 = 1e-12;

/// Orientation-preserving planar isometry `x ↦ R(angle)·x + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rigid2 {
    /// Rotation angle in (−π, π].
    pub angle: f64,
    pub t: Point2,
}

impl Default for Rigid2 {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Rigid2 {
    pub const IDENTITY: Rigid2 = Rigid2 {
        angle: 0.0,
        t: Point2::ORIGIN,
    };

    pub fn new(angle: f64, t: Point2) -> Self {
        Self {
            angle: normalize_angle(angle),
            t,
        }
    }

    pub fn translation(t: Point2) -> Self {
        Self { angle: 0.0, t }
    }

    /// Rotation by `omega` (counterclockwise) about `center`.
    pub fn rotation_about(omega: f64, center: Point2) -> Self {
        let t = center - center.rotated(omega);
        Self::new(omega, t)
    }

    #[inline]
    pub fn apply(&self, p: Point2) -> Point2 {
        p.rotated(self.angle) + self.t
    }

    /// Applies only the linear part.
    #[inline]
    pub fn apply_vector(&self, v: Point2) -> Point2 {
        v.rotated(self.angle)
    }

    /// `self` followed by `next`, i.e. the map `x ↦ next(self(x))`.
    pub fn then(&self, next: &Rigid2) -> Rigid2 {
        Rigid2::new(self.angle + next.angle, next.apply(self.t))
    }

    pub fn inverse(&self) -> Rigid2 {
        let t = (-self.t).rotated(-self.angle);
        Rigid2::new(-self.angle, t)
    }

    /// The unique motion taking segment `a0→a1` onto `b0→b1`, matching the
    /// start points and the directions. Lengths are assumed equal.
    pub fn from_segments(a0: Point2, a1: Point2, b0: Point2, b1: Point2) -> Rigid2 {
        let angle = (b1 - b0).angle() - (a1 - a0).angle();
        let t = b0 - a0.rotated(angle);
        Rigid2::new(angle, t)
    }

    /// Homogeneous 3×3 matrix, row-major.
    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        let (s, c) = self.angle.sin_cos();
        [[c, -s, self.t.x], [s, c, self.t.y], [0.0, 0.0, 1.0]]
    }

    /// Fixed point of the motion, using the default translation threshold.
    pub fn fixed_point(&self) -> Result<Point2, GeomError> {
        self.fixed_point_with(DEFAULT_TRANSLATION_THRESHOLD)
    }

    /// Solves `(I − R)x = t`. Written with half-angles so that small
    /// rotations keep full relative precision: `x = t/2 + ½·cot(θ/2)·J·t`.
    pub fn fixed_point_with(&self, threshold: f64) -> Result<Point2, GeomError> {
        if self.angle.abs() < threshold {
            return Err(GeomError::PureTranslation { angle: self.angle });
        }
        let half = 0.5 * self.angle;
        let cot = half.cos() / half.sin();
        Ok(self.t * 0.5 + self.t.perp() * (0.5 * cot))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_rotation_is_identity() {
        let m = Rigid2::rotation_about(0.0, Point2::new(3.0, 4.0));
        assert_eq!(m.angle, 0.0);
        assert!(m.t.norm() < 1e-15);
    }

    #[test]
    fn quarter_turn_about_origin() {
        let m = Rigid2::rotation_about(FRAC_PI_2, Point2::ORIGIN);
        let p = m.apply(Point2::new(1.0, 0.0));
        assert!((p - Point2::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn fixed_point_recovers_center() {
        let c = Point2::new(2.0, 1.0);
        let m = Rigid2::rotation_about(0.3, c);
        assert!((m.fixed_point().unwrap() - c).norm() < 1e-14);
    }

    #[test]
    fn identity_has_no_fixed_point() {
        assert!(matches!(
            Rigid2::IDENTITY.fixed_point(),
            Err(GeomError::PureTranslation { .. })
        ));
    }

    #[test]
    fn inverse_round_trip() {
        let m = Rigid2::new(1.1, Point2::new(-0.4, 2.5));
        let p = Point2::new(0.7, -1.3);
        let back = m.inverse().apply(m.apply(p));
        assert!((back - p).norm() < 1e-14);
        let id = m.then(&m.inverse());
        assert!(id.angle.abs() < 1e-15 && id.t.norm() < 1e-14);
    }

    #[test]
    fn from_segments_maps_endpoints() {
        let (a0, a1) = (Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
        let (b0, b1) = (Point2::new(5.0, 2.0), Point2::new(5.0 - 2f64.sqrt(), 2.0));
        let m = Rigid2::from_segments(a0, a1, b0, b1);
        assert!((m.apply(a0) - b0).norm() < 1e-14);
        assert!((m.apply(a1) - b1).norm() < 1e-14);
    }
}
