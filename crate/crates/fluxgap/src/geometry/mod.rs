//! Computational geometry for convex planar shapes: invariants, distance
//! functions, normal cones, orthogonal-ray widths and the injectivity radius.
//!
//! All operations are pure functions of their inputs and safe to call
//! concurrently.

mod distance;
mod point;
mod shape;
mod widths;

pub use distance::{distance_to_shape, normal_cone, DistanceResult, NormalCone};
pub use point::{nearest_on_segment, point_segment_distance, segment_segment_distance, Point};
pub use shape::{ConvexShape, PlanarDomain, COLLINEAR_TOL};
pub use widths::{
    flux_distance, injectivity_radius, injectivity_radius_sampled, widths, WidthConfig,
    WidthReport, Witness,
};

#[derive(Debug, thiserror::Error)]
pub enum GeomError {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("domain has no inner boundary")]
    NoInnerBoundary,
    #[error("internal geometry error: {0}")]
    Internal(String),
}
