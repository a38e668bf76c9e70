//! Line-based text format for meshes.
//!
//! ```text
//! fluxgap mesh 1
//! vertices N
//! triangles M
//! boundary K
//! <N lines: x y>
//! <M lines: a b c>
//! <K lines: a b outer|hole J>
//! ```
//!
//! Coordinates are written in the shortest representation that round-trips
//! exactly, so export followed by import is bit-identical.

use std::path::Path;

use super::{BoundaryTag, MeshError, TriMesh};
use crate::geometry::Point;

pub fn write_mesh_string(mesh: &TriMesh) -> String {
    let mut out = String::new();
    out.push_str("fluxgap mesh 1\n");
    out.push_str(&format!("vertices {}\n", mesh.vertices.len()));
    out.push_str(&format!("triangles {}\n", mesh.triangles.len()));
    out.push_str(&format!("boundary {}\n", mesh.boundary_edges.len()));
    for v in &mesh.vertices {
        out.push_str(&format!("{} {}\n", v.x, v.y));
    }
    for t in &mesh.triangles {
        out.push_str(&format!("{} {} {}\n", t[0], t[1], t[2]));
    }
    for (e, tag) in &mesh.boundary_edges {
        match tag {
            BoundaryTag::Outer => out.push_str(&format!("{} {} outer\n", e[0], e[1])),
            BoundaryTag::Hole(j) => out.push_str(&format!("{} {} hole {}\n", e[0], e[1], j)),
        }
    }
    out
}

pub fn export_mesh(mesh: &TriMesh, path: &Path) -> Result<(), MeshError> {
    std::fs::write(path, write_mesh_string(mesh))
        .map_err(|e| MeshError::Io { line: 0, msg: e.to_string() })
}

pub fn import_mesh(path: &Path) -> Result<TriMesh, MeshError> {
    let text = std::fs::read_to_string(path).map_err(|e| MeshError::Io { line: 0, msg: e.to_string() })?;
    parse_mesh(&text)
}

pub fn parse_mesh(text: &str) -> Result<TriMesh, MeshError> {
    let mut lines = text.lines().enumerate();
    let mut next = |expect: &str| -> Result<(usize, String), MeshError> {
        lines
            .next()
            .map(|(i, s)| (i + 1, s.to_string()))
            .ok_or_else(|| MeshError::Io { line: 0, msg: format!("unexpected end of file, expected {expect}") })
    };

    let (line, header) = next("header")?;
    if header.trim() != "fluxgap mesh 1" {
        return Err(MeshError::Io { line, msg: format!("bad header {header:?}") });
    }
    let mut counts = [0usize; 3];
    for (k, key) in ["vertices", "triangles", "boundary"].iter().enumerate() {
        let (line, s) = next(key)?;
        let mut parts = s.split_whitespace();
        if parts.next() != Some(key) {
            return Err(MeshError::Io { line, msg: format!("expected '{key} N', got {s:?}") });
        }
        counts[k] = parts
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| MeshError::Io { line, msg: format!("bad count in {s:?}") })?;
    }

    let mut vertices = Vec::with_capacity(counts[0]);
    for _ in 0..counts[0] {
        let (line, s) = next("vertex")?;
        let mut parts = s.split_whitespace();
        let x: f64 = parse_field(&mut parts, line, "x")?;
        let y: f64 = parse_field(&mut parts, line, "y")?;
        vertices.push(Point::new(x, y));
    }
    let mut triangles = Vec::with_capacity(counts[1]);
    for _ in 0..counts[1] {
        let (line, s) = next("triangle")?;
        let mut parts = s.split_whitespace();
        let a: usize = parse_field(&mut parts, line, "a")?;
        let b: usize = parse_field(&mut parts, line, "b")?;
        let c: usize = parse_field(&mut parts, line, "c")?;
        triangles.push([a, b, c]);
    }
    let mut boundary = Vec::with_capacity(counts[2]);
    for _ in 0..counts[2] {
        let (line, s) = next("boundary edge")?;
        let mut parts = s.split_whitespace();
        let a: usize = parse_field(&mut parts, line, "a")?;
        let b: usize = parse_field(&mut parts, line, "b")?;
        let tag = match parts.next() {
            Some("outer") => BoundaryTag::Outer,
            Some("hole") => BoundaryTag::Hole(parse_field(&mut parts, line, "hole index")?),
            other => {
                return Err(MeshError::Io { line, msg: format!("bad boundary tag {other:?}") });
            }
        };
        boundary.push(([a, b], tag));
    }
    TriMesh::new(vertices, triangles, boundary)
}

fn parse_field<T: std::str::FromStr>(
    parts: &mut std::str::SplitWhitespace,
    line: usize,
    name: &str,
) -> Result<T, MeshError> {
    parts
        .next()
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| MeshError::Io { line, msg: format!("missing or invalid field {name}") })
}
