use crate::geometry::Point;

use super::{BoundaryTag, MeshError, TriMesh};

/// Structured mesh of the concentric annulus `r1 < |x| < r2`:
/// `(nr + 1) * ntheta` vertices on concentric circles, quads split into
/// triangles with alternating diagonals. Ring 0 is tagged `Hole(0)`, the
/// outer ring `Outer`.
pub fn mesh_polar_annulus(r1: f64, r2: f64, nr: usize, ntheta: usize) -> Result<TriMesh, MeshError> {
    if !(r1 > 0.0 && r2 > r1) {
        return Err(MeshError::InvalidParams(format!("need 0 < r1 < r2, got r1={r1}, r2={r2}")));
    }
    if nr < 2 || ntheta < 8 {
        return Err(MeshError::InvalidParams(format!(
            "need nr >= 2 and ntheta >= 8, got nr={nr}, ntheta={ntheta}"
        )));
    }
    let mut vertices = Vec::with_capacity((nr + 1) * ntheta);
    for i in 0..=nr {
        let r = r1 + (r2 - r1) * i as f64 / nr as f64;
        for j in 0..ntheta {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / ntheta as f64;
            vertices.push(Point::from_angle(theta) * r);
        }
    }
    let idx = |i: usize, j: usize| i * ntheta + (j % ntheta);
    let mut triangles = Vec::with_capacity(2 * nr * ntheta);
    for i in 0..nr {
        for j in 0..ntheta {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            if (i + j) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    let mut boundary_edges = Vec::with_capacity(2 * ntheta);
    for j in 0..ntheta {
        boundary_edges.push(([idx(0, j), idx(0, j + 1)], BoundaryTag::Hole(0)));
        boundary_edges.push(([idx(nr, j), idx(nr, j + 1)], BoundaryTag::Outer));
    }
    TriMesh::new(vertices, triangles, boundary_edges)
}
