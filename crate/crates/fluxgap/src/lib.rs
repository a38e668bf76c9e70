//! Spectral toolkit for the magnetic Neumann Laplacian with zero magnetic
//! field on multiply connected planar domains.
//!
//! The operator `(i grad + A)^2` with closed potential `A` feels only the
//! fluxes of `A` around the holes of the domain. This crate computes its
//! lowest eigenvalue with a first-order finite element method, evaluates
//! geometric lower bounds for it (widths, perimeters, diameters, fluxes),
//! builds the partitions behind those bounds, and certifies the inequalities
//! numerically on concrete geometries.

pub mod geometry;
pub mod mesh;
pub mod potential;

pub use geometry::Point;
