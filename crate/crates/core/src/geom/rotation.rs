//! Composition of small planar rotations and its center-of-gravity
//! approximation.
//!
//! Order convention: a [`RotationSeq`] is applied front to back, so
//! `compose([r1, r2, .., rk])` is the map `x ↦ rk(..r2(r1(x)))`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::point::Point2;
use super::rigid::Rigid2;
use super::GeomError;

/// A single rotation by `omega ≥ 0` about `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub omega: f64,
    pub center: Point2,
}

impl Rotation {
    pub fn new(omega: f64, center: Point2) -> Self {
        Self { omega, center }
    }

    pub fn to_rigid(&self) -> Rigid2 {
        Rigid2::rotation_about(self.omega, self.center)
    }
}

/// Ordered rotations with nonnegative angles summing to less than a full turn.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RotationSeq {
    items: Vec<Rotation>,
}

impl RotationSeq {
    pub fn new(items: Vec<Rotation>) -> Result<Self, GeomError> {
        let mut total = 0.0;
        for r in &items {
            if !(r.omega.is_finite() && r.center.is_finite()) {
                return Err(GeomError::NonFinite);
            }
            if r.omega < 0.0 {
                return Err(GeomError::NegativeAngle(r.omega));
            }
            total += r.omega;
        }
        if total >= TAU {
            return Err(GeomError::FullTurn(total));
        }
        Ok(Self { items })
    }

    pub fn from_pairs(pairs: &[(f64, Point2)]) -> Result<Self, GeomError> {
        Self::new(pairs.iter().map(|&(w, p)| Rotation::new(w, p)).collect())
    }

    pub fn items(&self) -> &[Rotation] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn total_angle(&self) -> f64 {
        self.items.iter().map(|r| r.omega).sum()
    }

    pub fn centers(&self) -> Vec<Point2> {
        self.items.iter().map(|r| r.center).collect()
    }

    /// Same rotations with every angle multiplied by `eps`.
    pub fn scaled(&self, eps: f64) -> Result<Self, GeomError> {
        Self::new(
            self.items
                .iter()
                .map(|r| Rotation::new(r.omega * eps, r.center))
                .collect(),
        )
    }
}

/// Composes the sequence, first element applied first.
pub fn compose(seq: &RotationSeq) -> Result<Rigid2, GeomError> {
    if seq.is_empty() {
        return Err(GeomError::EmptySequence);
    }
    Ok(seq
        .items()
        .iter()
        .fold(Rigid2::IDENTITY, |acc, r| acc.then(&r.to_rigid())))
}

/// Composite center of rotation: the fixed point of [`compose`].
pub fn composite_center(seq: &RotationSeq) -> Result<Point2, GeomError> {
    compose(seq)?.fixed_point()
}

/// Exact center of the composite of two rotations in the normalized frame
/// `p1 = (0,0)`, `p2 = (1,0)`: rotate by `omega2` about `p2` first, then by
/// `omega1` about `p1`. The center lies at the apex of the triangle on
/// `p1 p2` with base angles `omega1/2` at `p1` and `omega2/2` at `p2`:
///
/// `c = (sin(ω₂/2)·cos(ω₁/2), sin(ω₁/2)·sin(ω₂/2)) / sin((ω₁+ω₂)/2)`.
pub fn two_rotation_center(omega1: f64, omega2: f64) -> Result<Point2, GeomError> {
    let total = omega1 + omega2;
    if !(total > 0.0 && total < TAU) {
        return Err(GeomError::DegenerateAngles { omega1, omega2 });
    }
    let denom = (0.5 * total).sin();
    if denom.abs() < 1e-300 {
        return Err(GeomError::DegenerateAngles { omega1, omega2 });
    }
    let (s1, c1) = (0.5 * omega1).sin_cos();
    let s2 = (0.5 * omega2).sin();
    Ok(Point2::new(s2 * c1 / denom, s1 * s2 / denom))
}

/// Angle-weighted average of the centers.
pub fn cg_center(seq: &RotationSeq) -> Result<Point2, GeomError> {
    let total = seq.total_angle();
    if total <= 0.0 {
        return Err(GeomError::ZeroTotalAngle);
    }
    let sum = seq
        .items()
        .iter()
        .fold(Point2::ORIGIN, |acc, r| acc + r.center * r.omega);
    Ok(sum * (1.0 / total))
}

/// Asymptotic bound on `|composite_center − cg_center|`: `½ Σ ℓᵢ·wᵢ` over
/// the links `ℓᵢ = |pᵢ₊₁ − pᵢ|`, where the link weight `wᵢ` is the smaller
/// of the total angle before the link (`ω₁+…+ωᵢ`) and after it
/// (`ωᵢ₊₁+…+ω_k`). For two rotations this is `½·ℓ·min(ω₁, ω₂)`.
pub fn cg_error_bound(seq: &RotationSeq) -> f64 {
    let items = seq.items();
    let total = seq.total_angle();
    let mut before = 0.0;
    let mut sum = 0.0;
    for w in items.windows(2) {
        before += w[0].omega;
        let weight = before.min(total - before).max(0.0);
        sum += w[0].center.dist(w[1].center) * weight;
    }
    0.5 * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn single_rotation_composes_to_itself() {
        let seq = RotationSeq::from_pairs(&[(0.4, p(1.0, -2.0))]).unwrap();
        let m = compose(&seq).unwrap();
        let r = Rigid2::rotation_about(0.4, p(1.0, -2.0));
        assert!((m.angle - r.angle).abs() < 1e-15);
        assert!((m.t - r.t).norm() < 1e-15);
    }

    #[test]
    fn shared_center_adds_angles() {
        let c = p(0.5, 0.25);
        let seq = RotationSeq::from_pairs(&[(0.1, c), (0.2, c)]).unwrap();
        let m = compose(&seq).unwrap();
        let r = Rigid2::rotation_about(0.3, c);
        assert!((m.angle - 0.3).abs() < 1e-15);
        assert!((m.t - r.t).norm() < 1e-15);
    }

    #[test]
    fn order_is_first_applied_first() {
        let seq = RotationSeq::from_pairs(&[(0.5, p(0.0, 0.0)), (0.7, p(1.0, 0.0))]).unwrap();
        let m = compose(&seq).unwrap();
        let x = p(0.3, 0.9);
        let expected = Rigid2::rotation_about(0.7, p(1.0, 0.0))
            .apply(Rigid2::rotation_about(0.5, p(0.0, 0.0)).apply(x));
        assert!((m.apply(x) - expected).norm() < 1e-15);
    }

    #[test]
    fn two_rotation_center_limits() {
        // Second rotation is the identity: the center is p1.
        let c = two_rotation_center(0.3, 0.0).unwrap();
        assert!(c.norm() < 1e-15);
        // Symmetric angles put the center over the midpoint.
        let w = 0.2;
        let c = two_rotation_center(w, w).unwrap();
        assert!((c.x - 0.5).abs() < 1e-15);
        assert!((c.y - 0.5 * (0.5 * w).tan()).abs() < 1e-15);
    }

    #[test]
    fn two_rotation_center_matches_composition() {
        let (w1, w2) = (0.2, 0.1);
        let seq = RotationSeq::from_pairs(&[(w2, p(1.0, 0.0)), (w1, p(0.0, 0.0))]).unwrap();
        let c = composite_center(&seq).unwrap();
        let closed = two_rotation_center(w1, w2).unwrap();
        assert!((c - closed).norm() < 1e-12, "{c:?} vs {closed:?}");
    }

    #[test]
    fn two_rotation_center_rejects_degenerate() {
        assert!(two_rotation_center(0.0, 0.0).is_err());
        assert!(two_rotation_center(std::f64::consts::PI, std::f64::consts::PI).is_err());
    }

    #[test]
    fn cg_center_basics() {
        let seq = RotationSeq::from_pairs(&[(0.3, p(2.0, 5.0))]).unwrap();
        assert_eq!(cg_center(&seq).unwrap(), p(2.0, 5.0));
        let seq = RotationSeq::from_pairs(&[(0.01, p(0.0, 0.0)), (0.01, p(1.0, 0.0))]).unwrap();
        assert!((cg_center(&seq).unwrap() - p(0.5, 0.0)).norm() < 1e-15);
        let zero = RotationSeq::from_pairs(&[(0.0, p(0.0, 0.0))]).unwrap();
        assert!(matches!(cg_center(&zero), Err(GeomError::ZeroTotalAngle)));
    }

    #[test]
    fn error_bound_hand_values() {
        let seq = RotationSeq::from_pairs(&[(0.01, p(0.0, 0.0)), (0.01, p(0.0, 0.0))]).unwrap();
        assert_eq!(cg_error_bound(&seq), 0.0);
        // ½ · ℓ · min(ω₁, ω₂) = ½ · 1 · 0.01
        let seq = RotationSeq::from_pairs(&[(0.01, p(0.0, 0.0)), (0.01, p(1.0, 0.0))]).unwrap();
        assert!((cg_error_bound(&seq) - 0.005).abs() < 1e-18);
        // Three links: weights min(A, W−A) = 0.01, 0.02 with W = 0.04.
        let seq = RotationSeq::from_pairs(&[
            (0.01, p(0.0, 0.0)),
            (0.01, p(1.0, 0.0)),
            (0.02, p(1.0, 2.0)),
        ])
        .unwrap();
        assert!((cg_error_bound(&seq) - 0.5 * (0.01 + 2.0 * 0.02)).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_sequences() {
        assert!(matches!(
            RotationSeq::from_pairs(&[(-0.1, p(0.0, 0.0))]),
            Err(GeomError::NegativeAngle(_))
        ));
        assert!(matches!(
            RotationSeq::from_pairs(&[(4.0, p(0.0, 0.0)), (3.0, p(1.0, 0.0))]),
            Err(GeomError::FullTurn(_))
        ));
        assert!(matches!(
            compose(&RotationSeq::default()),
            Err(GeomError::EmptySequence)
        ));
    }
}
