use crate::geometry::Point;

use super::{BoundaryTag, MeshError, TriMesh};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }
}

/// Boundary-fitted mesh of `outer \ inner` for axis-parallel rectangles.
///
/// The tensor grid lines include all four inner-rectangle coordinates, so the
/// hole boundary is matched exactly. Strips between the rectangles narrower
/// than three cells are refined to at least 3 layers, and the spans adjacent
/// to such thin strips are graded geometrically (ratio `grading`) from the
/// strip cell size back to `target_h`. Cells can therefore be strongly
/// anisotropic in the thin-gap family; the right-triangle split keeps every
/// angle at most 90 degrees, which is what the element accuracy needs.
pub fn mesh_rect_diff(outer: Rect, inner: Rect, target_h: f64, grading: f64) -> Result<TriMesh, MeshError> {
    if !(outer.x0 < outer.x1 && outer.y0 < outer.y1) {
        return Err(MeshError::InvalidParams("outer rectangle is degenerate".into()));
    }
    let gaps = [
        inner.x0 - outer.x0,
        outer.x1 - inner.x1,
        inner.y0 - outer.y0,
        outer.y1 - inner.y1,
    ];
    if gaps.iter().any(|&g| g <= 0.0) {
        return Err(MeshError::InvalidParams(
            "inner rectangle must be strictly inside the outer rectangle".into(),
        ));
    }
    if !(target_h > 0.0) || !(grading >= 1.0) {
        return Err(MeshError::InvalidParams("need target_h > 0 and grading >= 1".into()));
    }

    let xs = axis_breaks(outer.x0, inner.x0, inner.x1, outer.x1, target_h, grading);
    let ys = axis_breaks(outer.y0, inner.y0, inner.y1, outer.y1, target_h, grading);

    build_tensor_mesh(&xs, &ys, inner)
}

/// Break positions along one axis: three spans (gap, middle, gap), the gaps
/// getting at least 3 layers and the middle graded toward thin gaps.
fn axis_breaks(o0: f64, i0: f64, i1: f64, o1: f64, target_h: f64, grading: f64) -> Vec<f64> {
    let gap_lo = i0 - o0;
    let gap_hi = o1 - i1;
    let n_lo = ((gap_lo / target_h).ceil() as usize).max(3);
    let n_hi = ((gap_hi / target_h).ceil() as usize).max(3);
    let h_lo = gap_lo / n_lo as f64;
    let h_hi = gap_hi / n_hi as f64;

    let mut breaks = Vec::new();
    for k in 0..=n_lo {
        breaks.push(o0 + gap_lo * k as f64 / n_lo as f64);
    }
    let middle = span_intervals(i1 - i0, h_lo.min(target_h), h_hi.min(target_h), target_h, grading);
    let mut pos = i0;
    for dx in &middle {
        pos += dx;
        breaks.push(pos);
    }
    *breaks.last_mut().unwrap() = i1;
    for k in 1..=n_hi {
        breaks.push(i1 + gap_hi * k as f64 / n_hi as f64);
    }
    breaks
}

/// Interval widths tiling a span of length `len`, starting near `h0` on the
/// left and `h1` on the right and growing geometrically (factor `ratio`)
/// toward `target` in the middle.
fn span_intervals(len: f64, h0: f64, h1: f64, target: f64, ratio: f64) -> Vec<f64> {
    assert!(len > 0.0);
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut used = 0.0;
    let mut hl = h0;
    let mut hr = h1;
    // Grow from both ends until the graded cells reach the target size.
    loop {
        let mut advanced = false;
        if hl < target && used + hl < 0.5 * len {
            left.push(hl);
            used += hl;
            hl = (hl * ratio).min(target);
            advanced = true;
        }
        if hr < target && used + hr < 0.5 * len {
            right.push(hr);
            used += hr;
            hr = (hr * ratio).min(target);
            advanced = true;
        }
        if !advanced {
            break;
        }
    }
    let remaining = len - used;
    let n_mid = ((remaining / target).ceil() as usize).max(1);
    let mut out = left;
    for _ in 0..n_mid {
        out.push(remaining / n_mid as f64);
    }
    right.reverse();
    out.extend(right);
    out
}

fn build_tensor_mesh(xs: &[f64], ys: &[f64], inner: Rect) -> Result<TriMesh, MeshError> {
    let nx = xs.len();
    let ny = ys.len();
    let vid = |ix: usize, iy: usize| iy * nx + ix;
    let vertices: Vec<Point> = (0..ny)
        .flat_map(|iy| (0..nx).map(move |ix| (ix, iy)))
        .map(|(ix, iy)| Point::new(xs[ix], ys[iy]))
        .collect();

    let mut triangles = Vec::new();
    let mut used = vec![false; vertices.len()];
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let cx = 0.5 * (xs[ix] + xs[ix + 1]);
            let cy = 0.5 * (ys[iy] + ys[iy + 1]);
            if cx > inner.x0 && cx < inner.x1 && cy > inner.y0 && cy < inner.y1 {
                continue;
            }
            let a = vid(ix, iy);
            let b = vid(ix + 1, iy);
            let c = vid(ix + 1, iy + 1);
            let d = vid(ix, iy + 1);
            if (ix + iy) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
            for v in [a, b, c, d] {
                used[v] = true;
            }
        }
    }

    // Compress unused grid vertices away.
    let mut remap = vec![usize::MAX; vertices.len()];
    let mut compact = Vec::new();
    for (i, &u) in used.iter().enumerate() {
        if u {
            remap[i] = compact.len();
            compact.push(vertices[i]);
        }
    }
    for tri in &mut triangles {
        for v in tri.iter_mut() {
            *v = remap[*v];
        }
    }

    // Boundary edges by census, tagged by which rectangle they sit on.
    let mut census: std::collections::HashMap<(usize, usize), usize> = std::collections::HashMap::new();
    for tri in &triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = if a < b { (a, b) } else { (b, a) };
            *census.entry(key).or_insert(0) += 1;
        }
    }
    let tol = 1e-12 * (xs[nx - 1] - xs[0]).abs().max(1.0);
    let on_inner = |m: Point| -> bool {
        let on_v = (m.x - inner.x0).abs() < tol || (m.x - inner.x1).abs() < tol;
        let on_h = (m.y - inner.y0).abs() < tol || (m.y - inner.y1).abs() < tol;
        (on_v && m.y >= inner.y0 - tol && m.y <= inner.y1 + tol)
            || (on_h && m.x >= inner.x0 - tol && m.x <= inner.x1 + tol)
    };
    let mut boundary_edges = Vec::new();
    let mut keys: Vec<(usize, usize)> = census.iter().filter(|&(_, &c)| c == 1).map(|(&k, _)| k).collect();
    keys.sort_unstable();
    for (a, b) in keys {
        let m = (compact[a] + compact[b]) * 0.5;
        let tag = if on_inner(m) { BoundaryTag::Hole(0) } else { BoundaryTag::Outer };
        boundary_edges.push(([a, b], tag));
    }
    TriMesh::new(compact, triangles, boundary_edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thin_gap_carries_three_layers() {
        let outer = Rect::new(-4.0, 0.0, 4.0, 4.0);
        let inner = Rect::new(-3.0, 0.1, 3.0, 2.0);
        let m = mesh_rect_diff(outer, inner, 0.5, 1.5).unwrap();
        // Count distinct y-coordinates strictly inside the gap (0, 0.1).
        let mut ys: Vec<f64> = m
            .vertices
            .iter()
            .map(|p| p.y)
            .filter(|&y| y > 1e-12 && y < 0.1 - 1e-12)
            .collect();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ys.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        assert!(ys.len() >= 2, "gap carries {} internal levels", ys.len());
        // Exact area: tensor lines match the inner rectangle.
        let exact = 32.0 - 6.0 * 1.9;
        assert!((m.area() - exact).abs() < 1e-10);
        assert_eq!(m.euler_characteristic(), 0);
    }

    #[test]
    fn inner_touching_outer_is_rejected() {
        let outer = Rect::new(-4.0, 0.0, 4.0, 4.0);
        let inner = Rect::new(-3.0, 0.0, 3.0, 2.0);
        assert!(mesh_rect_diff(outer, inner, 0.5, 1.5).is_err());
    }

    #[test]
    fn boundary_tags_split_between_outer_and_hole() {
        let outer = Rect::new(0.0, 0.0, 3.0, 3.0);
        let inner = Rect::new(1.0, 1.0, 2.0, 2.0);
        let m = mesh_rect_diff(outer, inner, 0.5, 1.5).unwrap();
        let outer_len: f64 = m
            .boundary_edges
            .iter()
            .filter(|(_, t)| *t == BoundaryTag::Outer)
            .map(|(e, _)| m.vertices[e[0]].dist(m.vertices[e[1]]))
            .sum();
        let hole_len: f64 = m
            .boundary_edges
            .iter()
            .filter(|(_, t)| *t == BoundaryTag::Hole(0))
            .map(|(e, _)| m.vertices[e[0]].dist(m.vertices[e[1]]))
            .sum();
        assert!((outer_len - 12.0).abs() < 1e-10);
        assert!((hole_len - 4.0).abs() < 1e-10);
    }
}
