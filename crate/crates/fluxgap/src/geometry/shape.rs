use serde::{Deserialize, Serialize};

use super::point::{point_segment_distance, segment_segment_distance, Point};
use super::GeomError;

/// Tolerance on the cross product used to merge collinear consecutive edges.
pub const COLLINEAR_TOL: f64 = 1e-12;

/// A convex shape in the plane: the building block for domains and holes.
///
/// `Point` is only legal as a hole (a pole); the other variants can appear
/// anywhere. Polygons are stored counterclockwise and strictly convex;
/// construction normalizes orientation and merges collinear edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvexShape {
    Polygon(Vec<Point>),
    Disk { center: Point, r: f64 },
    Point(Point),
}

impl ConvexShape {
    /// Builds a validated convex polygon. Input may be clockwise (it gets
    /// reversed); collinear consecutive vertices are merged, duplicates and
    /// non-convex chains are rejected.
    pub fn polygon(vertices: Vec<Point>) -> Result<Self, GeomError> {
        let shape = ConvexShape::Polygon(vertices);
        shape.validated()
    }

    pub fn disk(center: Point, r: f64) -> Result<Self, GeomError> {
        let shape = ConvexShape::Disk { center, r };
        shape.validated()
    }

    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeomError> {
        Self::polygon(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    /// Validates the shape, normalizing polygons (CCW orientation, collinear
    /// vertices merged). Use after deserializing.
    pub fn validated(self) -> Result<Self, GeomError> {
        match self {
            ConvexShape::Polygon(mut verts) => {
                if verts.iter().any(|p| !p.is_finite()) {
                    return Err(GeomError::InvalidShape("non-finite vertex".into()));
                }
                if verts.len() < 3 {
                    return Err(GeomError::InvalidShape("polygon needs >= 3 vertices".into()));
                }
                if signed_area(&verts) < 0.0 {
                    verts.reverse();
                }
                // Merge collinear consecutive edges before convexity checks.
                let mut merged: Vec<Point> = Vec::with_capacity(verts.len());
                let n = verts.len();
                for i in 0..n {
                    let prev = verts[(i + n - 1) % n];
                    let cur = verts[i];
                    let next = verts[(i + 1) % n];
                    let cross = (cur - prev).cross(next - cur);
                    if cross.abs() <= COLLINEAR_TOL {
                        continue;
                    }
                    merged.push(cur);
                }
                if merged.len() < 3 {
                    return Err(GeomError::InvalidShape(
                        "polygon degenerates after merging collinear vertices".into(),
                    ));
                }
                let n = merged.len();
                for i in 0..n {
                    let a = merged[i];
                    let b = merged[(i + 1) % n];
                    if a.dist(b) <= COLLINEAR_TOL {
                        return Err(GeomError::InvalidShape("duplicate vertices".into()));
                    }
                    let c = merged[(i + 2) % n];
                    if (b - a).cross(c - b) <= COLLINEAR_TOL {
                        return Err(GeomError::InvalidShape("polygon is not strictly convex".into()));
                    }
                }
                Ok(ConvexShape::Polygon(merged))
            }
            ConvexShape::Disk { center, r } => {
                if !center.is_finite() || !r.is_finite() || r <= 0.0 {
                    return Err(GeomError::InvalidShape("disk radius must be positive".into()));
                }
                Ok(ConvexShape::Disk { center, r })
            }
            ConvexShape::Point(p) => {
                if !p.is_finite() {
                    return Err(GeomError::InvalidShape("non-finite point".into()));
                }
                Ok(ConvexShape::Point(p))
            }
        }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, ConvexShape::Point(_))
    }

    pub fn area(&self) -> Result<f64, GeomError> {
        match self {
            ConvexShape::Polygon(v) => Ok(signed_area(v)),
            ConvexShape::Disk { r, .. } => Ok(std::f64::consts::PI * r * r),
            ConvexShape::Point(_) => Err(GeomError::UnsupportedShape("area of a point".into())),
        }
    }

    pub fn perimeter(&self) -> Result<f64, GeomError> {
        match self {
            ConvexShape::Polygon(v) => {
                let n = v.len();
                Ok((0..n).map(|i| v[i].dist(v[(i + 1) % n])).sum())
            }
            ConvexShape::Disk { r, .. } => Ok(2.0 * std::f64::consts::PI * r),
            ConvexShape::Point(_) => Err(GeomError::UnsupportedShape("perimeter of a point".into())),
        }
    }

    /// Maximum pairwise distance of boundary points; over vertices for polygons.
    pub fn diameter(&self) -> Result<f64, GeomError> {
        match self {
            ConvexShape::Polygon(v) => {
                let mut best = 0.0f64;
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        best = best.max(v[i].dist(v[j]));
                    }
                }
                Ok(best)
            }
            ConvexShape::Disk { r, .. } => Ok(2.0 * r),
            ConvexShape::Point(_) => Err(GeomError::UnsupportedShape("diameter of a point".into())),
        }
    }

    /// A reference point in the interior (the centroid / center).
    pub fn interior_point(&self) -> Point {
        match self {
            ConvexShape::Polygon(v) => {
                let mut c = Point::default();
                for p in v {
                    c = c + *p;
                }
                c / v.len() as f64
            }
            ConvexShape::Disk { center, .. } | ConvexShape::Point(center) => *center,
        }
    }

    /// Containment in the closed shape (points contain only themselves).
    pub fn contains(&self, p: Point) -> bool {
        match self {
            ConvexShape::Polygon(v) => {
                let n = v.len();
                (0..n).all(|i| (v[(i + 1) % n] - v[i]).cross(p - v[i]) >= 0.0)
            }
            ConvexShape::Disk { center, r } => p.dist(*center) <= *r,
            ConvexShape::Point(c) => p == *c,
        }
    }

    /// Containment in the open interior.
    pub fn contains_strict(&self, p: Point) -> bool {
        match self {
            ConvexShape::Polygon(v) => {
                let n = v.len();
                (0..n).all(|i| (v[(i + 1) % n] - v[i]).cross(p - v[i]) > 0.0)
            }
            ConvexShape::Disk { center, r } => p.dist(*center) < *r,
            ConvexShape::Point(_) => false,
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bbox(&self) -> (Point, Point) {
        match self {
            ConvexShape::Polygon(v) => {
                let mut lo = v[0];
                let mut hi = v[0];
                for p in v {
                    lo.x = lo.x.min(p.x);
                    lo.y = lo.y.min(p.y);
                    hi.x = hi.x.max(p.x);
                    hi.y = hi.y.max(p.y);
                }
                (lo, hi)
            }
            ConvexShape::Disk { center, r } => (
                Point::new(center.x - r, center.y - r),
                Point::new(center.x + r, center.y + r),
            ),
            ConvexShape::Point(c) => (*c, *c),
        }
    }

    /// Parameter `t >= 0` at which the ray `origin + t*dir` first leaves the
    /// closed shape, for `origin` inside it. `None` if the ray never leaves
    /// (cannot happen for bounded shapes) or starts outside.
    pub fn ray_exit(&self, origin: Point, dir: Point) -> Option<f64> {
        match self {
            ConvexShape::Polygon(v) => {
                let (t_in, t_out) = clip_ray_convex(v, origin, dir)?;
                if t_in > 1e-12 {
                    return None;
                }
                Some(t_out)
            }
            ConvexShape::Disk { center, r } => {
                let (t0, t1) = ray_circle(origin, dir, *center, *r)?;
                if t0 > 1e-12 {
                    return None;
                }
                Some(t1)
            }
            ConvexShape::Point(_) => None,
        }
    }

    /// Parameter `t > 0` at which the ray `origin + t*dir` first enters the
    /// closed shape, for `origin` outside it. `None` if the ray misses.
    pub fn ray_entry(&self, origin: Point, dir: Point) -> Option<f64> {
        match self {
            ConvexShape::Polygon(v) => {
                let (t_in, t_out) = clip_ray_convex(v, origin, dir)?;
                if t_out < t_in || t_in <= 1e-12 {
                    return None;
                }
                Some(t_in)
            }
            ConvexShape::Disk { center, r } => {
                let (t0, t1) = ray_circle(origin, dir, *center, *r)?;
                if t1 <= 1e-12 || t0 <= 1e-12 {
                    return None;
                }
                Some(t0)
            }
            ConvexShape::Point(_) => None,
        }
    }

    /// Minimum distance between two shapes (0 if they touch or overlap).
    pub fn distance_to(&self, other: &ConvexShape) -> f64 {
        use ConvexShape::*;
        match (self, other) {
            (Point(a), Point(b)) => a.dist(*b),
            (Point(a), Disk { center, r }) | (Disk { center, r }, Point(a)) => {
                (a.dist(*center) - r).max(0.0)
            }
            (Disk { center: c1, r: r1 }, Disk { center: c2, r: r2 }) => {
                (c1.dist(*c2) - r1 - r2).max(0.0)
            }
            (Point(a), Polygon(v)) | (Polygon(v), Point(a)) => {
                if ConvexShape::Polygon(v.clone()).contains(*a) {
                    0.0
                } else {
                    boundary_distance(v, *a)
                }
            }
            (Disk { center, r }, Polygon(v)) | (Polygon(v), Disk { center, r }) => {
                let poly = ConvexShape::Polygon(v.clone());
                if poly.contains(*center) {
                    0.0
                } else {
                    (boundary_distance(v, *center) - r).max(0.0)
                }
            }
            (Polygon(a), Polygon(b)) => {
                let pa = ConvexShape::Polygon(a.clone());
                let pb = ConvexShape::Polygon(b.clone());
                if pa.contains(b[0]) || pb.contains(a[0]) {
                    return 0.0;
                }
                let mut best = f64::INFINITY;
                for i in 0..a.len() {
                    let (a0, a1) = (a[i], a[(i + 1) % a.len()]);
                    for j in 0..b.len() {
                        let (b0, b1) = (b[j], b[(j + 1) % b.len()]);
                        best = best.min(segment_segment_distance(a0, a1, b0, b1));
                    }
                }
                best
            }
        }
    }
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>()
}

fn boundary_distance(v: &[Point], p: Point) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| point_segment_distance(p, v[i], v[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Clips the ray `o + t d`, `t in R`, against a CCW convex polygon.
/// Returns the parameter interval `(t_in, t_out)` of the intersection.
fn clip_ray_convex(v: &[Point], o: Point, d: Point) -> Option<(f64, f64)> {
    let n = v.len();
    let mut t_in = f64::NEG_INFINITY;
    let mut t_out = f64::INFINITY;
    for i in 0..n {
        let a = v[i];
        let edge = v[(i + 1) % n] - a;
        // Inside of the CCW edge halfplane: cross(edge, x - a) >= 0.
        let denom = edge.cross(d);
        let num = edge.cross(o - a);
        if denom.abs() < 1e-300 {
            if num < 0.0 {
                return None;
            }
            continue;
        }
        let t = -num / denom;
        if denom > 0.0 {
            t_in = t_in.max(t);
        } else {
            t_out = t_out.min(t);
        }
        if t_in > t_out {
            return None;
        }
    }
    Some((t_in, t_out))
}

fn ray_circle(o: Point, d: Point, c: Point, r: f64) -> Option<(f64, f64)> {
    let oc = o - c;
    let a = d.norm_sq();
    let b = 2.0 * oc.dot(d);
    let k = oc.norm_sq() - r * r;
    let disc = b * b - 4.0 * a * k;
    if disc < 0.0 || a == 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some(((-b - s) / (2.0 * a), (-b + s) / (2.0 * a)))
}

/// An outer convex shape minus disjoint convex holes (possibly point poles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarDomain {
    pub outer: ConvexShape,
    #[serde(default)]
    pub holes: Vec<ConvexShape>,
    /// Radius used to realize point holes as small disks when meshing.
    #[serde(default = "default_pole_radius")]
    pub pole_radius: f64,
}

fn default_pole_radius() -> f64 {
    0.1
}

impl PlanarDomain {
    pub fn new(outer: ConvexShape, holes: Vec<ConvexShape>, pole_radius: f64) -> Result<Self, GeomError> {
        let d = PlanarDomain { outer, holes, pole_radius };
        d.validated()
    }

    pub fn validated(self) -> Result<Self, GeomError> {
        let outer = self.outer.validated()?;
        if outer.is_point() {
            return Err(GeomError::InvalidDomain("outer shape cannot be a point".into()));
        }
        let holes: Vec<ConvexShape> = self
            .holes
            .into_iter()
            .map(|h| h.validated())
            .collect::<Result<_, _>>()?;
        let has_point_hole = holes.iter().any(|h| h.is_point());
        if has_point_hole && !(self.pole_radius > 0.0) {
            return Err(GeomError::InvalidDomain(
                "pole_radius must be positive when point holes are present".into(),
            ));
        }
        for (i, h) in holes.iter().enumerate() {
            if !hole_inside_open(&outer, h) {
                return Err(GeomError::InvalidDomain(format!(
                    "hole {i} is not contained in the open interior of the outer shape"
                )));
            }
            for (j, g) in holes.iter().enumerate().skip(i + 1) {
                if h.distance_to(g) <= 0.0 {
                    return Err(GeomError::InvalidDomain(format!(
                        "holes {i} and {j} have intersecting closures"
                    )));
                }
            }
        }
        Ok(PlanarDomain { outer, holes, pole_radius: self.pole_radius })
    }

    /// Containment in the closed domain (outer closure minus open holes).
    pub fn contains(&self, p: Point) -> bool {
        self.outer.contains(p) && self.holes.iter().all(|h| !h.contains_strict(p))
    }

    /// Containment in the open domain.
    pub fn contains_strict(&self, p: Point) -> bool {
        self.outer.contains_strict(p) && self.holes.iter().all(|h| !h.contains(p))
    }

    /// Minimum of pairwise hole-hole and hole-outer boundary distances.
    pub fn beta_tilde(&self) -> Result<f64, GeomError> {
        if self.holes.is_empty() {
            return Err(GeomError::NoInnerBoundary);
        }
        let mut best = f64::INFINITY;
        for (i, h) in self.holes.iter().enumerate() {
            best = best.min(distance_to_outer_boundary(&self.outer, h));
            for g in self.holes.iter().skip(i + 1) {
                best = best.min(h.distance_to(g));
            }
        }
        Ok(best)
    }

    /// Realizes point holes as disks of radius `pole_radius`; other holes pass through.
    pub fn realized_holes(&self) -> Vec<ConvexShape> {
        self.holes
            .iter()
            .map(|h| match h {
                ConvexShape::Point(c) => ConvexShape::Disk { center: *c, r: self.pole_radius },
                other => other.clone(),
            })
            .collect()
    }
}

fn hole_inside_open(outer: &ConvexShape, hole: &ConvexShape) -> bool {
    match hole {
        ConvexShape::Point(p) => outer.contains_strict(*p),
        ConvexShape::Disk { center, r } => {
            outer.contains_strict(*center) && distance_to_outer_boundary_point(outer, *center) > *r
        }
        ConvexShape::Polygon(v) => v.iter().all(|p| outer.contains_strict(*p)),
    }
}

/// Distance from a hole to the boundary of the enclosing outer shape.
fn distance_to_outer_boundary(outer: &ConvexShape, hole: &ConvexShape) -> f64 {
    match (outer, hole) {
        (ConvexShape::Disk { center, r }, h) => {
            // Distance from the hole to the circle |x - c| = r, from inside.
            match h {
                ConvexShape::Point(p) => r - p.dist(*center),
                ConvexShape::Disk { center: hc, r: hr } => r - hc.dist(*center) - hr,
                ConvexShape::Polygon(v) => v
                    .iter()
                    .map(|p| r - p.dist(*center))
                    .fold(f64::INFINITY, f64::min),
            }
        }
        (ConvexShape::Polygon(ov), h) => {
            let n = ov.len();
            let mut best = f64::INFINITY;
            for i in 0..n {
                let (a, b) = (ov[i], ov[(i + 1) % n]);
                let d = match h {
                    ConvexShape::Point(p) => point_segment_distance(*p, a, b),
                    ConvexShape::Disk { center, r } => point_segment_distance(*center, a, b) - r,
                    ConvexShape::Polygon(v) => {
                        let m = v.len();
                        (0..m)
                            .map(|j| segment_segment_distance(a, b, v[j], v[(j + 1) % m]))
                            .fold(f64::INFINITY, f64::min)
                    }
                };
                best = best.min(d);
            }
            best
        }
        (ConvexShape::Point(_), _) => f64::INFINITY,
    }
}

fn distance_to_outer_boundary_point(outer: &ConvexShape, p: Point) -> f64 {
    distance_to_outer_boundary(outer, &ConvexShape::Point(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_disk() -> ConvexShape {
        ConvexShape::disk(Point::new(0.0, 0.0), 1.0).unwrap()
    }

    fn rect_8x4() -> ConvexShape {
        ConvexShape::rectangle(-4.0, 0.0, 4.0, 4.0).unwrap()
    }

    #[test]
    fn area_examples() {
        assert!((unit_disk().area().unwrap() - PI).abs() < 1e-15);
        assert!((rect_8x4().area().unwrap() - 32.0).abs() < 1e-12);
        let tri = ConvexShape::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        assert!((tri.area().unwrap() - 0.5).abs() < 1e-15);
        assert!(ConvexShape::Point(Point::default()).area().is_err());
    }

    #[test]
    fn perimeter_examples() {
        assert!((unit_disk().perimeter().unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!((rect_8x4().perimeter().unwrap() - 24.0).abs() < 1e-12);
        let sq = ConvexShape::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!((sq.perimeter().unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn diameter_examples() {
        assert!((rect_8x4().diameter().unwrap() - 4.0 * 5.0f64.sqrt()).abs() < 1e-12);
        assert!((unit_disk().diameter().unwrap() - 2.0).abs() < 1e-15);
        // Brute force over vertex pairs for the square [-2,2]^2.
        let sq = ConvexShape::rectangle(-2.0, -2.0, 2.0, 2.0).unwrap();
        let verts = match &sq {
            ConvexShape::Polygon(v) => v.clone(),
            _ => unreachable!(),
        };
        let mut brute = 0.0f64;
        for a in &verts {
            for b in &verts {
                brute = brute.max(a.dist(*b));
            }
        }
        assert!((sq.diameter().unwrap() - brute).abs() < 1e-15);
        assert!((brute - 4.0 * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cw_input_is_normalized() {
        let cw = ConvexShape::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
        ])
        .unwrap();
        assert!(cw.area().unwrap() > 0.0);
    }

    #[test]
    fn collinear_vertices_merged_not_rejected() {
        let p = ConvexShape::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        match p {
            ConvexShape::Polygon(v) => assert_eq!(v.len(), 4),
            _ => unreachable!(),
        }
    }

    #[test]
    fn nonconvex_rejected() {
        let r = ConvexShape::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, 0.5),
            Point::new(2.0, 2.0),
            Point::new(0.0, 2.0),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn ray_casting() {
        let sq = ConvexShape::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let t = sq.ray_exit(Point::new(0.5, 0.5), Point::new(1.0, 0.0)).unwrap();
        assert!((t - 0.5).abs() < 1e-14);
        let t = sq.ray_entry(Point::new(-1.0, 0.5), Point::new(1.0, 0.0)).unwrap();
        assert!((t - 1.0).abs() < 1e-14);
        assert!(sq.ray_entry(Point::new(-1.0, 0.5), Point::new(-1.0, 0.0)).is_none());
        let disk = unit_disk();
        let t = disk.ray_exit(Point::new(0.0, 0.0), Point::new(0.0, 1.0)).unwrap();
        assert!((t - 1.0).abs() < 1e-14);
    }

    #[test]
    fn domain_validation() {
        let outer = rect_8x4();
        let hole = ConvexShape::rectangle(-3.0, 0.1, 3.0, 2.0).unwrap();
        assert!(PlanarDomain::new(outer.clone(), vec![hole], 0.1).is_ok());

        let touching = ConvexShape::rectangle(-3.0, 0.0, 3.0, 2.0).unwrap();
        assert!(PlanarDomain::new(outer.clone(), vec![touching], 0.1).is_err());

        let a = ConvexShape::disk(Point::new(-1.0, 2.0), 0.6).unwrap();
        let b = ConvexShape::disk(Point::new(0.0, 2.0), 0.6).unwrap();
        assert!(PlanarDomain::new(outer, vec![a, b], 0.1).is_err());
    }

    #[test]
    fn domain_json_format() {
        let json = r#"{
            "outer": {"polygon": [[-4,0],[4,0],[4,4],[-4,4]]},
            "holes": [{"disk": {"center": [0,2], "r": 0.5}}, {"point": [2,2]}],
            "pole_radius": 0.05
        }"#;
        let d: PlanarDomain = serde_json::from_str(json).unwrap();
        let d = d.validated().unwrap();
        assert_eq!(d.holes.len(), 2);
        assert!(d.holes[1].is_point());
    }

    #[test]
    fn beta_tilde_concentric() {
        let d = PlanarDomain::new(
            ConvexShape::disk(Point::default(), 1.2).unwrap(),
            vec![unit_disk()],
            0.1,
        )
        .unwrap();
        assert!((d.beta_tilde().unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn shape_distance_pairs() {
        let a = ConvexShape::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        let b = ConvexShape::rectangle(2.0, 0.0, 3.0, 1.0).unwrap();
        assert!((a.distance_to(&b) - 1.0).abs() < 1e-14);
        let d = ConvexShape::disk(Point::new(0.5, 3.0), 1.0).unwrap();
        assert!((a.distance_to(&d) - 1.0).abs() < 1e-14);
        assert_eq!(a.distance_to(&ConvexShape::Point(Point::new(0.5, 0.5))), 0.0);
    }
}
