use super::point::{nearest_on_segment, Point};
use super::shape::ConvexShape;
use super::GeomError;

/// Result of a point-to-shape distance query.
///
/// `dist` is nonnegative outside the shape and negative (signed) inside, with
/// `inside` set. `grad` is the unit vector from the nearest boundary point
/// toward `x` (the gradient of the distance function where it is smooth);
/// `at_medial_axis` flags queries where the nearest boundary point is not
/// unique within tolerance, so the gradient is only one of the candidates.
#[derive(Debug, Clone, Copy)]
pub struct DistanceResult {
    pub dist: f64,
    pub grad: Point,
    pub inside: bool,
    pub at_medial_axis: bool,
}

const TIE_TOL: f64 = 1e-12;

/// Distance from `x` to a convex shape together with the gradient direction.
pub fn distance_to_shape(x: Point, shape: &ConvexShape) -> Result<DistanceResult, GeomError> {
    match shape {
        ConvexShape::Point(c) => {
            let d = x.dist(*c);
            if d == 0.0 {
                return Ok(DistanceResult {
                    dist: 0.0,
                    grad: Point::new(1.0, 0.0),
                    inside: false,
                    at_medial_axis: true,
                });
            }
            Ok(DistanceResult { dist: d, grad: (x - *c) / d, inside: false, at_medial_axis: false })
        }
        ConvexShape::Disk { center, r } => {
            let dc = x.dist(*center);
            let inside = dc < *r;
            let grad = if dc == 0.0 {
                // Center of the disk: every direction minimizes.
                return Ok(DistanceResult {
                    dist: -*r,
                    grad: Point::new(1.0, 0.0),
                    inside: true,
                    at_medial_axis: true,
                });
            } else {
                (x - *center) / dc
            };
            Ok(DistanceResult { dist: dc - r, grad, inside, at_medial_axis: false })
        }
        ConvexShape::Polygon(v) => {
            let inside = shape.contains(x);
            if inside {
                // For a convex polygon the interior distance to the boundary
                // is the minimum distance to the edge supporting lines.
                let n = v.len();
                let mut best = f64::INFINITY;
                let mut second = f64::INFINITY;
                let mut grad = Point::new(1.0, 0.0);
                for i in 0..n {
                    let a = v[i];
                    let e = v[(i + 1) % n] - a;
                    let inward = e.perp().normalized();
                    let d = (x - a).dot(inward);
                    if d < best {
                        second = best;
                        best = d;
                        // Gradient of the signed distance points away from the edge.
                        grad = inward;
                    } else if d < second {
                        second = d;
                    }
                }
                if best <= TIE_TOL {
                    // On the boundary: report the outward normal.
                    return Ok(DistanceResult {
                        dist: 0.0,
                        grad: -grad,
                        inside: false,
                        at_medial_axis: (second - best).abs() <= TIE_TOL,
                    });
                }
                Ok(DistanceResult {
                    dist: -best,
                    grad,
                    inside: true,
                    at_medial_axis: (second - best).abs() <= TIE_TOL,
                })
            } else {
                let n = v.len();
                let mut best = f64::INFINITY;
                let mut second = f64::INFINITY;
                let mut nearest = v[0];
                for i in 0..n {
                    let q = nearest_on_segment(x, v[i], v[(i + 1) % n]);
                    let d = q.dist(x);
                    if d < best {
                        second = best;
                        best = d;
                        nearest = q;
                    } else if d < second {
                        second = d;
                    }
                }
                let grad = if best == 0.0 {
                    // On the boundary: gradient is the outward normal there.
                    outward_normal_at(v, x)
                } else {
                    (x - nearest) / best
                };
                // Adjacent edges share a vertex, so a nearest point at a vertex
                // shows up as a tie; that is not a medial-axis point.
                let vertex_tie = v.iter().any(|p| p.dist(nearest) <= TIE_TOL);
                Ok(DistanceResult {
                    dist: best,
                    grad,
                    inside: false,
                    at_medial_axis: (second - best).abs() <= TIE_TOL && !vertex_tie,
                })
            }
        }
    }
}

fn outward_normal_at(v: &[Point], x: Point) -> Point {
    let n = v.len();
    for i in 0..n {
        let a = v[i];
        let e = v[(i + 1) % n] - a;
        if (x - a).cross(e).abs() <= 1e-9 && (x - a).dot(e) >= -1e-9 && (x - v[(i + 1) % n]).dot(e) <= 1e-9 {
            return -e.perp().normalized();
        }
    }
    // Fallback: direction from centroid.
    let mut c = Point::default();
    for p in v {
        c = c + *p;
    }
    (x - c / n as f64).normalized()
}

/// The normal cone of a convex shape at a boundary vertex.
#[derive(Debug, Clone, Copy)]
pub struct NormalCone {
    pub vertex: Point,
    pub dir_lo: Point,
    pub dir_hi: Point,
    /// Cone opening angle; pi minus the interior angle at the vertex.
    pub alpha: f64,
    /// Set for smooth shapes, where the cone collapses to a single normal.
    pub degenerate: bool,
}

impl NormalCone {
    /// Direction at fraction `t in [0,1]` across the cone, from lo to hi.
    pub fn direction(&self, t: f64) -> Point {
        if self.degenerate {
            return self.dir_lo;
        }
        self.dir_lo.rotate(self.alpha * t)
    }
}

/// Normal cone at vertex `index` of a polygon. Smooth shapes return a
/// degenerate cone (single outward normal, `alpha = 0`) anchored at the
/// boundary point of angular parameter 0.
pub fn normal_cone(shape: &ConvexShape, index: usize) -> Result<NormalCone, GeomError> {
    match shape {
        ConvexShape::Polygon(v) => {
            let n = v.len();
            if index >= n {
                return Err(GeomError::InvalidShape(format!(
                    "vertex index {index} out of range for polygon with {n} vertices"
                )));
            }
            let prev = v[(index + n - 1) % n];
            let cur = v[index];
            let next = v[(index + 1) % n];
            // For a CCW polygon the outward edge normal is the clockwise perp.
            let dir_lo = -(cur - prev).perp().normalized();
            let dir_hi = -(next - cur).perp().normalized();
            let alpha = dir_lo.cross(dir_hi).atan2(dir_lo.dot(dir_hi));
            debug_assert!(alpha > 0.0 && alpha < std::f64::consts::PI);
            Ok(NormalCone { vertex: cur, dir_lo, dir_hi, alpha, degenerate: false })
        }
        ConvexShape::Disk { center, r } => {
            let vertex = *center + Point::new(*r, 0.0);
            let n = Point::new(1.0, 0.0);
            Ok(NormalCone { vertex, dir_lo: n, dir_hi: n, alpha: 0.0, degenerate: true })
        }
        ConvexShape::Point(c) => {
            // A point's "normal cone" is the full plane; callers treat poles
            // separately, so report a degenerate marker.
            Ok(NormalCone {
                vertex: *c,
                dir_lo: Point::new(1.0, 0.0),
                dir_hi: Point::new(1.0, 0.0),
                alpha: 0.0,
                degenerate: true,
            })
        }
    }
}
