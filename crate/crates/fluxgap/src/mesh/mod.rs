//! Conforming triangulations of the supported domain families.
//!
//! Three meshers cover everything the toolkit solves on: a polar annulus mesh
//! for concentric circular domains, a boundary-fitted tensor mesh for
//! rectangle-minus-rectangle domains, and a staircase mesh as the general
//! fallback. Meshes are immutable after construction and validated on every
//! construction path.

mod io;
mod polar;
mod rect;
mod staircase;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

pub use io::{export_mesh, import_mesh, write_mesh_string};
pub use polar::mesh_polar_annulus;
pub use rect::{mesh_rect_diff, Rect};
pub use staircase::{mesh_staircase, mesh_staircase_predicate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryTag {
    Outer,
    Hole(usize),
}

impl std::fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryTag::Outer => write!(f, "outer"),
            BoundaryTag::Hole(j) => write!(f, "hole {j}"),
        }
    }
}

/// A conforming triangulation with tagged boundary edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    /// CCW vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<([usize; 2], BoundaryTag)>,
    /// Maximum edge length.
    pub h: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("invalid mesh parameters: {0}")]
    InvalidParams(String),
    #[error("triangle {0} has nonpositive area (inverted or degenerate)")]
    InvertedTriangle(usize),
    #[error("mesh is not conforming: edge ({0}, {1}) is shared by {2} triangles")]
    NonConforming(usize, usize, usize),
    #[error("boundary edge ({0}, {1}) is untagged")]
    UntaggedBoundary(usize, usize),
    #[error("tagged edge ({0}, {1}) is not a boundary edge")]
    BogusBoundaryTag(usize, usize),
    #[error("hole {0} is not resolved at this mesh size")]
    Resolution(usize),
    #[error("mesh io error at line {line}: {msg}")]
    Io { line: usize, msg: String },
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeomError),
}

impl TriMesh {
    /// Builds a mesh and validates conformity, orientation and boundary tags.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<([usize; 2], BoundaryTag)>,
    ) -> Result<Self, MeshError> {
        let mut mesh = TriMesh { vertices, triangles, boundary_edges, h: 0.0 };
        mesh.h = mesh.max_edge_length();
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let nv = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(MeshError::InvalidParams(format!("triangle {t} references a missing vertex")));
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(MeshError::InvertedTriangle(t));
            }
        }
        let census = self.edge_census();
        for (&(a, b), &count) in &census {
            if count > 2 {
                return Err(MeshError::NonConforming(a, b, count));
            }
        }
        let mut tagged: HashMap<(usize, usize), BoundaryTag> = HashMap::new();
        for &(e, tag) in &self.boundary_edges {
            let key = ordered(e[0], e[1]);
            match census.get(&key) {
                Some(1) => {
                    tagged.insert(key, tag);
                }
                _ => return Err(MeshError::BogusBoundaryTag(e[0], e[1])),
            }
        }
        for (&(a, b), &count) in &census {
            if count == 1 && !tagged.contains_key(&(a, b)) {
                return Err(MeshError::UntaggedBoundary(a, b));
            }
        }
        Ok(())
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * (pb - pa).cross(pc - pa)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangles[t];
        (self.vertices[a] + self.vertices[b] + self.vertices[c]) / 3.0
    }

    fn max_edge_length(&self) -> f64 {
        let mut h = 0.0f64;
        for tri in &self.triangles {
            for k in 0..3 {
                h = h.max(self.vertices[tri[k]].dist(self.vertices[tri[(k + 1) % 3]]));
            }
        }
        h
    }

    fn edge_census(&self) -> HashMap<(usize, usize), usize> {
        let mut census = HashMap::with_capacity(self.triangles.len() * 3 / 2);
        for tri in &self.triangles {
            for k in 0..3 {
                *census.entry(ordered(tri[k], tri[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        census
    }

    /// V - E + F; equals 1 minus the number of holes for a valid mesh of a
    /// multiply connected domain.
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.vertices.len() as i64;
        let e = self.edge_census().len() as i64;
        let f = self.triangles.len() as i64;
        v - e + f
    }

    /// Extracts the submesh carried by a set of triangles. Vertices are
    /// renumbered; boundary edges are re-derived and tagged by `tag`.
    pub fn submesh(
        &self,
        tri_indices: &[usize],
        tag: impl Fn(Point) -> BoundaryTag,
    ) -> Result<TriMesh, MeshError> {
        let mut vmap: HashMap<usize, usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut triangles = Vec::with_capacity(tri_indices.len());
        for &t in tri_indices {
            let tri = self.triangles[t];
            let mut new_tri = [0usize; 3];
            for k in 0..3 {
                let idx = *vmap.entry(tri[k]).or_insert_with(|| {
                    vertices.push(self.vertices[tri[k]]);
                    vertices.len() - 1
                });
                new_tri[k] = idx;
            }
            triangles.push(new_tri);
        }
        let mut census: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &triangles {
            for k in 0..3 {
                *census.entry(ordered(tri[k], tri[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        let mut boundary_edges = Vec::new();
        let mut keys: Vec<(usize, usize)> = census
            .iter()
            .filter(|&(_, &c)| c == 1)
            .map(|(&k, _)| k)
            .collect();
        keys.sort_unstable();
        for (a, b) in keys {
            let mid = (vertices[a] + vertices[b]) * 0.5;
            boundary_edges.push(([a, b], tag(mid)));
        }
        TriMesh::new(vertices, triangles, boundary_edges)
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Quality summary of a mesh.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshQuality {
    pub n_vertices: usize,
    pub n_triangles: usize,
    pub n_boundary_edges: usize,
    pub h_max: f64,
    pub h_min: f64,
    pub min_angle_deg: f64,
    pub euler_characteristic: i64,
    pub area: f64,
}

pub fn quality(mesh: &TriMesh) -> MeshQuality {
    let mut h_min = f64::INFINITY;
    let mut min_angle = f64::INFINITY;
    for tri in &mesh.triangles {
        for k in 0..3 {
            let a = mesh.vertices[tri[k]];
            let b = mesh.vertices[tri[(k + 1) % 3]];
            let c = mesh.vertices[tri[(k + 2) % 3]];
            h_min = h_min.min(a.dist(b));
            let u = b - a;
            let v = c - a;
            min_angle = min_angle.min(u.cross(v).atan2(u.dot(v)).abs());
        }
    }
    MeshQuality {
        n_vertices: mesh.vertices.len(),
        n_triangles: mesh.triangles.len(),
        n_boundary_edges: mesh.boundary_edges.len(),
        h_max: mesh.h,
        h_min,
        min_angle_deg: min_angle.to_degrees(),
        euler_characteristic: mesh.euler_characteristic(),
        area: mesh.area(),
    }
}
