//! Edge-unfolding of nearly flat, acutely triangulated convex caps together
//! with their convex base.
//!
//! The pipeline projects the cap to the plane, grows a quadrant-based
//! angle-monotone cut forest, develops the cut cap isometrically, and then
//! searches for a boundary edge across which the base can be flipped out
//! without overlap.

pub mod cap;
pub mod capgen;
pub mod forest;
pub mod unfold;
pub mod base;
pub mod io;
pub mod geom;
