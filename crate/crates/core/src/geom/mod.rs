//! Planar primitives: points, rigid motions, rotation composition, convex
//! hulls and polygon overlap.

mod hull;
mod overlap;
mod point;
mod rigid;
mod rotation;

use thiserror::Error;

pub use hull::{convex_hull_2d, in_convex_polygon, orient2d, segment_distance, signed_line_distance};
pub use overlap::{
    check_simple, convex_penetration, is_convex, polygons_overlap, polygons_overlap_with,
    segments_intersect, DEFAULT_OVERLAP_TOL,
};
pub use point::{normalize_angle, polygon_area, signed_area2, Point2};
pub use rigid::{Rigid2, DEFAULT_TRANSLATION_THRESHOLD};
pub use rotation::{
    cg_center, cg_error_bound, compose, composite_center, two_rotation_center, Rotation,
    RotationSeq,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("motion is a pure translation (angle {angle:e} rad); no unique fixed point")]
    PureTranslation { angle: f64 },
    #[error("degenerate angle pair ({omega1}, {omega2}): sin((ω₁+ω₂)/2) vanishes")]
    DegenerateAngles { omega1: f64, omega2: f64 },
    #[error("rotation angles sum to zero")]
    ZeroTotalAngle,
    #[error("empty rotation sequence")]
    EmptySequence,
    #[error("negative rotation angle {0}")]
    NegativeAngle(f64),
    #[error("rotation angles sum to {0}, at least a full turn")]
    FullTurn(f64),
    #[error("non-finite coordinate or angle")]
    NonFinite,
    #[error("polygon is not simple")]
    NonSimplePolygon,
}
