//! Closed one-forms with prescribed fluxes.
//!
//! The potential is a sum of pole terms
//! `A(x) = sum_j phi_j * (-(y - a_y), x - a_x) / |x - a|^2`,
//! each contributing flux `phi_j` around its pole `a_j` and nothing around
//! any loop that does not enclose the pole. Away from the poles `dA = 0`, so
//! line integrals reduce to exact angle increments seen from each pole; no
//! quadrature enters any flux or gauge computation here.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::mesh::TriMesh;

#[derive(Debug, thiserror::Error)]
pub enum PotentialError {
    #[error("evaluation point within 1e-12 of pole {0}")]
    Singularity(usize),
    #[error("loop passes through pole {0}")]
    PoleOnLoop(usize),
    #[error("invalid potential: {0}")]
    Invalid(String),
    #[error("region is not simply connected (V - E + F = {0}, expected 1)")]
    NotSimplyConnected(i64),
    #[error("pole {0} lies inside the region")]
    PoleInRegion(usize),
    #[error("gauge scalar closedness check failed on edge ({0}, {1}): residual {2:e}")]
    NotClosed(usize, usize, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub at: Point,
    pub flux: f64,
}

/// A closed potential one-form realized as a finite sum of pole terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ClosedPotential {
    pub poles: Vec<Pole>,
}

impl ClosedPotential {
    pub fn new(poles: Vec<(Point, f64)>) -> Result<Self, PotentialError> {
        let poles: Vec<Pole> = poles.into_iter().map(|(at, flux)| Pole { at, flux }).collect();
        for (i, p) in poles.iter().enumerate() {
            if !p.at.is_finite() || !p.flux.is_finite() {
                return Err(PotentialError::Invalid(format!("pole {i} is not finite")));
            }
        }
        Ok(ClosedPotential { poles })
    }

    pub fn single(at: Point, flux: f64) -> Self {
        ClosedPotential { poles: vec![Pole { at, flux }] }
    }

    /// Gauge-canonical representative: every flux reduced to `[-1/2, 1/2]`.
    /// The continuum spectrum is unchanged (fluxes matter modulo integers)
    /// and the discrete quadrature error shrinks with `|A|`.
    pub fn reduced(&self) -> Self {
        ClosedPotential {
            poles: self
                .poles
                .iter()
                .map(|p| Pole { at: p.at, flux: p.flux - p.flux.round() })
                .collect(),
        }
    }

    pub fn is_integer_flux(&self) -> bool {
        self.poles.iter().all(|p| (p.flux - p.flux.round()).abs() < 1e-12)
    }

    /// Covector `(A_1, A_2)` at `x`; errors out within 1e-12 of a pole.
    pub fn eval(&self, x: Point) -> Result<Point, PotentialError> {
        for (i, p) in self.poles.iter().enumerate() {
            if (x - p.at).norm() <= 1e-12 {
                return Err(PotentialError::Singularity(i));
            }
        }
        Ok(self.eval_unchecked(x))
    }

    /// Pointwise evaluation without the pole-proximity guard. Callers must
    /// keep `x` away from the poles (mesh assembly validates this globally).
    pub fn eval_unchecked(&self, x: Point) -> Point {
        let mut a = Point::default();
        for p in &self.poles {
            let d = x - p.at;
            let r2 = d.norm_sq();
            a = a + d.perp() * (p.flux / r2);
        }
        a
    }

    /// Exact line integral of the potential along the segment `[a, b]`:
    /// the sum over poles of flux times the swept angle.
    pub fn line_integral(&self, a: Point, b: Point) -> f64 {
        self.poles
            .iter()
            .map(|p| p.flux * sweep_angle(p.at, a, b))
            .sum()
    }

    /// Flux across a closed polyline: `sum_j phi_j * wind(loop, a_j)`.
    /// Winding numbers are integers, so the result carries no quadrature
    /// error beyond one rounding per pole.
    pub fn flux_around(&self, loop_points: &[Point]) -> Result<f64, PotentialError> {
        if loop_points.len() < 3 {
            return Err(PotentialError::Invalid("loop needs at least 3 points".into()));
        }
        let mut total = 0.0;
        for (i, p) in self.poles.iter().enumerate() {
            let mut angle = 0.0;
            let n = loop_points.len();
            for k in 0..n {
                let a = loop_points[k];
                let b = loop_points[(k + 1) % n];
                if crate::geometry::point_segment_distance(p.at, a, b) <= 1e-12 {
                    return Err(PotentialError::PoleOnLoop(i));
                }
                angle += sweep_angle(p.at, a, b);
            }
            let wind = (angle / (2.0 * std::f64::consts::PI)).round();
            total += p.flux * wind;
        }
        Ok(total)
    }
}

/// Signed angle of the segment `[a, b]` as seen from `pole`, in `(-pi, pi)`.
fn sweep_angle(pole: Point, a: Point, b: Point) -> f64 {
    let u = a - pole;
    let v = b - pole;
    u.cross(v).atan2(u.dot(v))
}

/// Integrates the potential along a spanning tree of the region's edges,
/// yielding a per-vertex scalar `f` with `f(v) - f(u)` equal to the exact
/// line integral of `A` along every region edge (closedness). The region is
/// the submesh carried by `region_tris` and must be simply connected and
/// pole-free. Vertices outside the region get `NaN`.
pub fn gauge_scalar(
    potential: &ClosedPotential,
    mesh: &TriMesh,
    region_tris: &[usize],
) -> Result<Vec<f64>, PotentialError> {
    // Collect region vertices and undirected edges.
    let mut edges: HashMap<(usize, usize), ()> = HashMap::new();
    let mut verts: Vec<usize> = Vec::new();
    let mut in_region = vec![false; mesh.vertices.len()];
    for &t in region_tris {
        let tri = mesh.triangles[t];
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            edges.insert(if a < b { (a, b) } else { (b, a) }, ());
            if !in_region[tri[k]] {
                in_region[tri[k]] = true;
                verts.push(tri[k]);
            }
        }
    }
    let euler = verts.len() as i64 - edges.len() as i64 + region_tris.len() as i64;
    if euler != 1 {
        return Err(PotentialError::NotSimplyConnected(euler));
    }
    for (i, p) in potential.poles.iter().enumerate() {
        for &t in region_tris {
            let [a, b, c] = mesh.triangles[t];
            if point_in_triangle(p.at, mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]) {
                return Err(PotentialError::PoleInRegion(i));
            }
        }
    }

    // Adjacency, then BFS from the smallest region vertex for determinism.
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(a, b) in edges.keys() {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    for nbrs in adj.values_mut() {
        nbrs.sort_unstable();
    }
    let root = *verts.iter().min().unwrap();
    let mut f = vec![f64::NAN; mesh.vertices.len()];
    f[root] = 0.0;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        if let Some(nbrs) = adj.get(&u) {
            for &v in nbrs {
                if f[v].is_nan() {
                    f[v] = f[u] + potential.line_integral(mesh.vertices[u], mesh.vertices[v]);
                    queue.push_back(v);
                }
            }
        }
    }

    // Closedness certificate on every region edge, tree or not.
    for &(a, b) in edges.keys() {
        let li = potential.line_integral(mesh.vertices[a], mesh.vertices[b]);
        let residual = (f[b] - f[a] - li).abs();
        if residual > 1e-10 {
            return Err(PotentialError::NotClosed(a, b, residual));
        }
    }
    Ok(f)
}

fn point_in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    let d1 = (b - a).cross(p - a);
    let d2 = (c - b).cross(p - b);
    let d3 = (a - c).cross(p - c);
    d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0
}
