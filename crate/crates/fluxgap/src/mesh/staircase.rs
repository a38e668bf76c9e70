use crate::geometry::{distance_to_shape, ConvexShape, PlanarDomain, Point};

use super::{BoundaryTag, MeshError, TriMesh};

/// Staircase mesh of a planar domain: uniform grid cells entirely inside the
/// domain are kept and split into two triangles each. The boundary is
/// approximated crudely (first order), so this mesher backs only the loose
/// tolerance paths. Point holes are realized as disks of `pole_radius`.
pub fn mesh_staircase(domain: &PlanarDomain, h: f64) -> Result<TriMesh, MeshError> {
    if !(h > 0.0) {
        return Err(MeshError::InvalidParams("h must be positive".into()));
    }
    let holes = domain.realized_holes();
    if !domain.holes.is_empty() {
        let realized = PlanarDomain {
            outer: domain.outer.clone(),
            holes: holes.clone(),
            pole_radius: domain.pole_radius,
        };
        let beta_tilde = realized.beta_tilde()?;
        if h >= beta_tilde / 4.0 {
            return Err(MeshError::InvalidParams(format!(
                "h = {h} does not resolve the domain: need h < beta_tilde/4 = {}",
                beta_tilde / 4.0
            )));
        }
        if domain.holes.iter().any(|hl| hl.is_point()) && domain.pole_radius < 4.0 * h {
            return Err(MeshError::InvalidParams(format!(
                "pole_radius = {} must be at least 4h = {}",
                domain.pole_radius,
                4.0 * h
            )));
        }
    }

    let (lo, hi) = domain.outer.bbox();
    let nx = ((hi.x - lo.x) / h).ceil() as usize;
    let ny = ((hi.y - lo.y) / h).ceil() as usize;
    if nx == 0 || ny == 0 {
        return Err(MeshError::InvalidParams("empty domain bounding box".into()));
    }

    let mut kept = vec![false; nx * ny];
    let mut excluded_by_hole = vec![false; holes.len()];
    for iy in 0..ny {
        for ix in 0..nx {
            let clo = Point::new(lo.x + ix as f64 * h, lo.y + iy as f64 * h);
            let chi = Point::new(clo.x + h, clo.y + h);
            let corners = [clo, Point::new(chi.x, clo.y), chi, Point::new(clo.x, chi.y)];
            if !corners.iter().all(|&c| domain.outer.contains(c)) {
                continue;
            }
            let mut blocked = false;
            for (k, hole) in holes.iter().enumerate() {
                if box_intersects(hole, clo, chi) {
                    excluded_by_hole[k] = true;
                    blocked = true;
                }
            }
            if !blocked {
                kept[iy * nx + ix] = true;
            }
        }
    }
    for (k, &hit) in excluded_by_hole.iter().enumerate() {
        if !hit {
            return Err(MeshError::Resolution(k));
        }
    }

    let tag = |m: Point| nearest_component(domain, &holes, m);
    cells_to_mesh(&kept, nx, ny, lo, h, &tag)
}

/// Staircase mesh of an arbitrary region given by a membership predicate.
/// A cell is kept when nine sample points (corners, edge midpoints, center)
/// all belong to the region; only the largest connected component survives.
/// Used for partition pieces, where tolerances are loose by design.
pub fn mesh_staircase_predicate(
    contains: &dyn Fn(Point) -> bool,
    bbox: (Point, Point),
    h: f64,
    tag: &dyn Fn(Point) -> BoundaryTag,
) -> Result<TriMesh, MeshError> {
    if !(h > 0.0) {
        return Err(MeshError::InvalidParams("h must be positive".into()));
    }
    let (lo, hi) = bbox;
    let nx = ((hi.x - lo.x) / h).ceil() as usize;
    let ny = ((hi.y - lo.y) / h).ceil() as usize;
    if nx == 0 || ny == 0 {
        return Err(MeshError::InvalidParams("empty bounding box".into()));
    }
    let mut kept = vec![false; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let x0 = lo.x + ix as f64 * h;
            let y0 = lo.y + iy as f64 * h;
            let ok = [
                (0.0, 0.0),
                (1.0, 0.0),
                (1.0, 1.0),
                (0.0, 1.0),
                (0.5, 0.0),
                (1.0, 0.5),
                (0.5, 1.0),
                (0.0, 0.5),
                (0.5, 0.5),
            ]
            .iter()
            .all(|&(sx, sy)| contains(Point::new(x0 + sx * h, y0 + sy * h)));
            kept[iy * nx + ix] = ok;
        }
    }
    keep_largest_component(&mut kept, nx, ny);
    if !kept.iter().any(|&k| k) {
        return Err(MeshError::InvalidParams("region contains no full cell at this h".into()));
    }
    cells_to_mesh(&kept, nx, ny, lo, h, tag)
}

fn nearest_component(domain: &PlanarDomain, holes: &[ConvexShape], m: Point) -> BoundaryTag {
    let mut best = distance_to_shape(m, &domain.outer).map(|r| r.dist.abs()).unwrap_or(f64::INFINITY);
    let mut tag = BoundaryTag::Outer;
    for (k, hole) in holes.iter().enumerate() {
        if let Ok(r) = distance_to_shape(m, hole) {
            if r.dist.abs() < best {
                best = r.dist.abs();
                tag = BoundaryTag::Hole(k);
            }
        }
    }
    tag
}

fn keep_largest_component(kept: &mut [bool], nx: usize, ny: usize) {
    let mut label = vec![0usize; kept.len()];
    let mut sizes = vec![0usize];
    let mut next = 1usize;
    let mut stack = Vec::new();
    for start in 0..kept.len() {
        if !kept[start] || label[start] != 0 {
            continue;
        }
        let mut size = 0;
        stack.push(start);
        label[start] = next;
        while let Some(c) = stack.pop() {
            size += 1;
            let (ix, iy) = (c % nx, c / nx);
            let mut push = |jx: usize, jy: usize| {
                let j = jy * nx + jx;
                if kept[j] && label[j] == 0 {
                    label[j] = next;
                    stack.push(j);
                }
            };
            if ix > 0 {
                push(ix - 1, iy);
            }
            if ix + 1 < nx {
                push(ix + 1, iy);
            }
            if iy > 0 {
                push(ix, iy - 1);
            }
            if iy + 1 < ny {
                push(ix, iy + 1);
            }
        }
        sizes.push(size);
        next += 1;
    }
    if next <= 2 {
        return;
    }
    let biggest = (1..next).max_by_key(|&l| sizes[l]).unwrap();
    for (k, l) in label.iter().enumerate() {
        if *l != biggest {
            kept[k] = false;
        }
    }
}

fn cells_to_mesh(
    kept: &[bool],
    nx: usize,
    ny: usize,
    lo: Point,
    h: f64,
    tag: &dyn Fn(Point) -> BoundaryTag,
) -> Result<TriMesh, MeshError> {
    let node = |ix: usize, iy: usize| iy * (nx + 1) + ix;
    let mut remap = vec![usize::MAX; (nx + 1) * (ny + 1)];
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            if !kept[iy * nx + ix] {
                continue;
            }
            let ids = [node(ix, iy), node(ix + 1, iy), node(ix + 1, iy + 1), node(ix, iy + 1)];
            let mut v = [0usize; 4];
            for (k, &id) in ids.iter().enumerate() {
                if remap[id] == usize::MAX {
                    remap[id] = vertices.len();
                    let gx = id % (nx + 1);
                    let gy = id / (nx + 1);
                    vertices.push(Point::new(lo.x + gx as f64 * h, lo.y + gy as f64 * h));
                }
                v[k] = remap[id];
            }
            let [a, b, c, d] = v;
            if (ix + iy) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    let mut census: std::collections::HashMap<(usize, usize), usize> = std::collections::HashMap::new();
    for tri in &triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = if a < b { (a, b) } else { (b, a) };
            *census.entry(key).or_insert(0) += 1;
        }
    }
    let mut keys: Vec<(usize, usize)> = census.iter().filter(|&(_, &c)| c == 1).map(|(&k, _)| k).collect();
    keys.sort_unstable();
    let boundary_edges = keys
        .into_iter()
        .map(|(a, b)| {
            let m = (vertices[a] + vertices[b]) * 0.5;
            ([a, b], tag(m))
        })
        .collect();
    TriMesh::new(vertices, triangles, boundary_edges)
}

/// Intersection test between the open interior of a convex shape and an
/// axis-aligned box. Touching along the boundary does not count, so cells
/// adjacent to a grid-aligned hole are kept.
fn box_intersects(shape: &ConvexShape, lo: Point, hi: Point) -> bool {
    match shape {
        ConvexShape::Point(p) => p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y,
        ConvexShape::Disk { center, r } => {
            let cx = center.x.clamp(lo.x, hi.x);
            let cy = center.y.clamp(lo.y, hi.y);
            (Point::new(cx, cy) - *center).norm_sq() < r * r
        }
        ConvexShape::Polygon(v) => {
            // Separating axis test over the box axes and the polygon normals.
            let (mut pxmin, mut pxmax, mut pymin, mut pymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for p in v {
                pxmin = pxmin.min(p.x);
                pxmax = pxmax.max(p.x);
                pymin = pymin.min(p.y);
                pymax = pymax.max(p.y);
            }
            if pxmax <= lo.x || pxmin >= hi.x || pymax <= lo.y || pymin >= hi.y {
                return false;
            }
            let corners = [lo, Point::new(hi.x, lo.y), hi, Point::new(lo.x, hi.y)];
            let n = v.len();
            for i in 0..n {
                let axis = (v[(i + 1) % n] - v[i]).perp();
                let (mut amin, mut amax) = (f64::MAX, f64::MIN);
                for p in v {
                    let d = p.dot(axis);
                    amin = amin.min(d);
                    amax = amax.max(d);
                }
                let (mut bmin, mut bmax) = (f64::MAX, f64::MIN);
                for c in corners {
                    let d = c.dot(axis);
                    bmin = bmin.min(d);
                    bmax = bmax.max(d);
                }
                if amax <= bmin || amin >= bmax {
                    return false;
                }
            }
            true
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexShape, PlanarDomain, Point};

    fn disk_domain(r: f64) -> PlanarDomain {
        PlanarDomain::new(ConvexShape::disk(Point::default(), r).unwrap(), vec![], 0.1).unwrap()
    }

    #[test]
    fn disk_area_converges() {
        // A maximal fully-inside staircase loses a boundary ring of mean
        // width 2h/pi, about 6.4% of the disk at h = 0.05.
        let m = mesh_staircase(&disk_domain(1.0), 0.05).unwrap();
        let exact = std::f64::consts::PI;
        assert!((m.area() - exact).abs() / exact < 0.07, "area {}", m.area());
        let fine = mesh_staircase(&disk_domain(1.0), 0.02).unwrap();
        assert!((fine.area() - exact).abs() / exact < 0.03, "area {}", fine.area());
        // Every vertex lies in the closed domain.
        for v in &m.vertices {
            assert!(v.norm() <= 1.0 + 1e-12);
        }
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn unresolved_hole_is_an_error() {
        let d = PlanarDomain::new(
            ConvexShape::rectangle(-2.0, -2.0, 2.0, 2.0).unwrap(),
            vec![ConvexShape::Point(Point::new(0.3, 0.2))],
            0.05,
        )
        .unwrap();
        // pole_radius 0.05 < 4h for h = 0.1.
        assert!(mesh_staircase(&d, 0.1).is_err());
    }

    #[test]
    fn square_in_square_is_exact() {
        let d = PlanarDomain::new(
            ConvexShape::rectangle(-2.0, -2.0, 2.0, 2.0).unwrap(),
            vec![ConvexShape::rectangle(-1.0, -1.0, 1.0, 1.0).unwrap()],
            0.1,
        )
        .unwrap();
        let m = mesh_staircase(&d, 0.125).unwrap();
        assert!((m.area() - 12.0).abs() < 1e-10);
        assert_eq!(m.euler_characteristic(), 0);
        // Tags split between outer and the hole.
        let n_hole = m
            .boundary_edges
            .iter()
            .filter(|(_, t)| *t == BoundaryTag::Hole(0))
            .count();
        assert_eq!(n_hole, 4 * 16);
    }

    #[test]
    fn predicate_mesh_of_an_l_shape() {
        let contains = |p: Point| {
            (p.x >= 0.0 && p.x <= 2.0 && p.y >= 0.0 && p.y <= 1.0)
                || (p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 2.0)
        };
        let m = mesh_staircase_predicate(
            &contains,
            (Point::new(0.0, 0.0), Point::new(2.0, 2.0)),
            0.125,
            &|_| BoundaryTag::Outer,
        )
        .unwrap();
        assert!((m.area() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn area_convergence_rates() {
        // Staircase on a disk converges at first order; the polar mesh at
        // second order. Fit the slopes over a refinement sequence.
        let exact = std::f64::consts::PI;
        let errs: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&h| (mesh_staircase(&disk_domain(1.0), h).unwrap().area() - exact).abs())
            .collect();
        let slope = ((errs[0] / errs[2]).ln() / (4.0f64).ln()).abs();
        assert!(slope >= 0.9, "staircase slope {slope}");

        let exact = std::f64::consts::PI * 3.0;
        let errs: Vec<f64> = [8usize, 16, 32]
            .iter()
            .map(|&n| {
                (crate::mesh::mesh_polar_annulus(1.0, 2.0, n, 8 * n).unwrap().area() - exact).abs()
            })
            .collect();
        let slope = (errs[0] / errs[2]).ln() / (4.0f64).ln();
        assert!(slope >= 1.8, "polar slope {slope}");
    }
}
