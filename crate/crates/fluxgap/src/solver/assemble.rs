//! P1 finite element assembly of the magnetic stiffness and mass matrices.
//!
//! The sesquilinear form is `a(u, v) = int (grad u - iAu) . conj(grad v - iAv)`.
//! With real hat functions this expands per element into the plain stiffness
//! part, an imaginary cross term linear in `A`, and a `|A|^2` mass-like term.
//! The `A`-dependent integrals use 3-point edge-midpoint quadrature, which is
//! exact for quadratics and hence exact when `A` is constant on the element.
//! Boundary edges get no special treatment: the natural boundary condition of
//! the form is exactly the magnetic Neumann condition.

use num_complex::Complex64;

use super::sparse::CsrMatrix;
use super::SolverError;
use crate::geometry::{point_segment_distance, Point};
use crate::mesh::TriMesh;
use crate::potential::ClosedPotential;

pub struct AssembledSystem {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub warnings: Vec<String>,
}

/// Element stiffness and mass matrices for a triangle with vertices `p`,
/// evaluating the potential through `a_eval` at the quadrature points.
pub fn element_matrices(
    p: [Point; 3],
    a_eval: &dyn Fn(Point) -> Point,
) -> ([[Complex64; 3]; 3], [[f64; 3]; 3]) {
    let area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]);
    debug_assert!(area > 0.0);
    // Constant basis gradients: grad phi_i = perp of the opposite edge / 2|T|.
    let grad = [
        (p[2] - p[1]).perp() / (2.0 * area),
        (p[0] - p[2]).perp() / (2.0 * area),
        (p[1] - p[0]).perp() / (2.0 * area),
    ];
    // Midpoint quadrature; phi_i at the midpoint of edge (u,v) is 1/2 when i
    // is an endpoint of the edge and 0 otherwise.
    let pairs = [(0usize, 1usize), (1, 2), (2, 0)];
    let a_at: [Point; 3] = [
        a_eval((p[0] + p[1]) * 0.5),
        a_eval((p[1] + p[2]) * 0.5),
        a_eval((p[2] + p[0]) * 0.5),
    ];
    let w = area / 3.0;
    let mut k = [[Complex64::ZERO; 3]; 3];
    let mut m = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let stiff = area * grad[i].dot(grad[j]);
            let mut cross = 0.0;
            let mut asq = 0.0;
            for (e, &(u, v)) in pairs.iter().enumerate() {
                let phi_i = if i == u || i == v { 0.5 } else { 0.0 };
                let phi_j = if j == u || j == v { 0.5 } else { 0.0 };
                cross += w * a_at[e].dot(grad[j] * phi_i - grad[i] * phi_j);
                asq += w * a_at[e].norm_sq() * phi_i * phi_j;
            }
            k[i][j] = Complex64::new(stiff + asq, cross);
            m[i][j] = if i == j { area / 6.0 } else { area / 12.0 };
        }
    }
    (k, m)
}

pub fn assemble(mesh: &TriMesh, potential: &ClosedPotential) -> Result<AssembledSystem, SolverError> {
    let mut warnings = Vec::new();
    for (j, pole) in potential.poles.iter().enumerate() {
        let mut min_dist = f64::INFINITY;
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let (a, b, c) = (mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
            if point_in_triangle(pole.at, a, b, c) {
                return Err(SolverError::PoleInsideMesh(j, t));
            }
            min_dist = min_dist
                .min(point_segment_distance(pole.at, a, b))
                .min(point_segment_distance(pole.at, b, c))
                .min(point_segment_distance(pole.at, c, a));
        }
        if min_dist < 2.0 * mesh.h {
            warnings.push(format!(
                "pole {j} is {min_dist:.3e} from the meshed region (< 2h = {:.3e}); accuracy degrades",
                2.0 * mesh.h
            ));
        }
    }

    let nv = mesh.vertices.len();
    let mut k_trips = Vec::with_capacity(9 * mesh.triangles.len());
    let mut m_trips = Vec::with_capacity(9 * mesh.triangles.len());
    let a_eval = |x: Point| potential.eval_unchecked(x);

    for tri in &mesh.triangles {
        let p = [mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]];
        let (ke, me) = element_matrices(p, &a_eval);
        for i in 0..3 {
            for j in 0..3 {
                k_trips.push((tri[i], tri[j], ke[i][j]));
                m_trips.push((tri[i], tri[j], Complex64::new(me[i][j], 0.0)));
            }
        }
    }

    Ok(AssembledSystem {
        stiffness: CsrMatrix::from_triplets(nv, k_trips),
        mass: CsrMatrix::from_triplets(nv, m_trips),
        warnings,
    })
}

pub fn point_in_triangle(x: Point, a: Point, b: Point, c: Point) -> bool {
    let d1 = (b - a).cross(x - a);
    let d2 = (c - b).cross(x - b);
    let d3 = (a - c).cross(x - c);
    d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::mesh_polar_annulus;

    #[test]
    fn zero_potential_gives_real_neumann_stiffness() {
        let mesh = mesh_polar_annulus(1.0, 2.0, 4, 16).unwrap();
        let sys = assemble(&mesh, &ClosedPotential::default()).unwrap();
        // Constants are in the kernel: row sums vanish.
        let ones = vec![Complex64::new(1.0, 0.0); sys.stiffness.n];
        let k1 = sys.stiffness.matvec(&ones);
        let max_row_sum = k1.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(max_row_sum < 1e-12, "row sum {max_row_sum:e}");
        let max_im = sys.stiffness.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        assert!(max_im < 1e-15);
    }

    #[test]
    fn stiffness_is_hermitian() {
        let mesh = mesh_polar_annulus(1.0, 2.0, 4, 16).unwrap();
        let a = ClosedPotential::single(Point::default(), 0.37);
        let sys = assemble(&mesh, &a).unwrap();
        assert!(sys.stiffness.hermitian_defect() <= 1e-13);
        assert!(sys.mass.hermitian_defect() <= 1e-15);
    }

    #[test]
    fn element_matrix_matches_symbolic_integration_for_constant_potential() {
        // Reference triangle (0,0), (1,0), (0,1) with constant A. The exact
        // integrals are: K_ij = |T| gi.gj + i |T|/3 A.(gj - gi)
        //                + |A|^2 |T|/12 (1 + delta_ij),
        // using int phi_i = |T|/3 and int phi_i phi_j = |T|/12 (1 + delta).
        let p = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let a_const = Point::new(0.4, -0.3);
        let (k, m) = element_matrices(p, &|_| a_const);
        let area = 0.5;
        let grads = [Point::new(-1.0, -1.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        for i in 0..3 {
            for j in 0..3 {
                let re = area * grads[i].dot(grads[j])
                    + a_const.norm_sq() * area / 12.0 * if i == j { 2.0 } else { 1.0 };
                let im = a_const.dot(grads[j] - grads[i]) * area / 3.0;
                let expect = Complex64::new(re, im);
                assert!((k[i][j] - expect).norm() < 1e-15, "entry ({i},{j})");
                let m_expect = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                assert!((m[i][j] - m_expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pole_inside_mesh_is_an_error() {
        let mesh = TriMesh::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
            vec![[0, 1, 2]],
            vec![
                ([0, 1], crate::mesh::BoundaryTag::Outer),
                ([1, 2], crate::mesh::BoundaryTag::Outer),
                ([2, 0], crate::mesh::BoundaryTag::Outer),
            ],
        )
        .unwrap();
        let a = ClosedPotential::single(Point::new(0.25, 0.25), 0.5);
        assert!(matches!(assemble(&mesh, &a), Err(SolverError::PoleInsideMesh(0, 0))));
    }

    #[test]
    fn near_pole_warns() {
        let mesh = mesh_polar_annulus(1.0, 2.0, 4, 16).unwrap();
        let a = ClosedPotential::single(Point::new(0.999, 0.0), 0.5);
        let sys = assemble(&mesh, &a).unwrap();
        assert!(!sys.warnings.is_empty());
    }
}
