//! Convex polygons and Sutherland–Hodgman clipping restricted to convex
//! inputs, which is all the Voronoi/supermesh pipeline ever produces.

use crate::{Point, Rect, GEOM_EPS};

/// A convex polygon as a CCW vertex loop. Fewer than 3 vertices means empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    pub vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        ConvexPolygon { vertices }
    }

    pub fn empty() -> Self {
        ConvexPolygon { vertices: Vec::new() }
    }

    pub fn from_rect(r: &Rect) -> Self {
        ConvexPolygon { vertices: r.corners().to_vec() }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Shoelace area; zero for degenerate loops.
    pub fn area(&self) -> f64 {
        polygon_area(self)
    }

    /// Area centroid. Falls back to the vertex mean for degenerate loops.
    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        if n == 0 {
            return Point::new(0.0, 0.0);
        }
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a2 = 0.0;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
            a2 += w;
        }
        if a2.abs() < 1e-300 {
            let mut mx = 0.0;
            let mut my = 0.0;
            for p in &self.vertices {
                mx += p.x;
                my += p.y;
            }
            return Point::new(mx / n as f64, my / n as f64);
        }
        Point::new(cx / (3.0 * a2), cy / (3.0 * a2))
    }

    /// Largest pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.vertices.len() {
            for j in (i + 1)..self.vertices.len() {
                d = d.max(self.vertices[i].dist(self.vertices[j]));
            }
        }
        d
    }

    pub fn bbox(&self) -> Rect {
        Rect::hull_of(&self.vertices)
    }

    /// CCW convexity audit: every consecutive edge cross product must be
    /// ≥ -eps, with eps scaled by the squared diameter.
    pub fn is_ccw_convex(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return true;
        }
        let scale = self.diameter().powi(2).max(1e-300);
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let c = self.vertices[(i + 2) % n];
            if (b - a).cross(c - b) < -GEOM_EPS * scale {
                return false;
            }
        }
        true
    }
}

/// Shoelace area of a CCW polygon; 0 for fewer than 3 vertices.
pub fn polygon_area(p: &ConvexPolygon) -> f64 {
    let n = p.vertices.len();
    if n < 3 {
        return 0.0;
    }
    let mut a2 = 0.0;
    for i in 0..n {
        a2 += p.vertices[i].cross(p.vertices[(i + 1) % n]);
    }
    0.5 * a2
}

/// Keep the part of `poly` with `(p - origin) · normal <= offset`, i.e. the
/// closed half-plane on the inner side of the directed line.
///
/// The half-plane is given in Hesse form: `n · p <= c` with `n` not
/// necessarily unit. New vertices are placed by linear interpolation along
/// the crossing edges.
pub fn clip_halfplane(poly: &[Point], n: Point, c: f64) -> Vec<Point> {
    let len = poly.len();
    if len == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(len + 1);
    for i in 0..len {
        let s = poly[i];
        let e = poly[(i + 1) % len];
        let ds = n.dot(s) - c;
        let de = n.dot(e) - c;
        let s_in = ds <= 0.0;
        let e_in = de <= 0.0;
        match (s_in, e_in) {
            (true, true) => out.push(e),
            (true, false) => {
                let t = ds / (ds - de);
                out.push(Point::new(s.x + (e.x - s.x) * t, s.y + (e.y - s.y) * t));
            }
            (false, true) => {
                let t = ds / (ds - de);
                out.push(Point::new(s.x + (e.x - s.x) * t, s.y + (e.y - s.y) * t));
                out.push(e);
            }
            (false, false) => {}
        }
    }
    out
}

/// Intersection of two convex CCW polygons by successive half-plane clips of
/// `p` against the edges of `q`. Empty result is a valid polygon.
pub fn clip_convex(p: &ConvexPolygon, q: &ConvexPolygon) -> ConvexPolygon {
    if p.is_empty() || q.is_empty() {
        return ConvexPolygon::empty();
    }
    let nq = q.vertices.len();
    let mut cur = p.vertices.clone();
    for i in 0..nq {
        let a = q.vertices[i];
        let b = q.vertices[(i + 1) % nq];
        // Inner side of CCW edge a->b is the left side: outward normal is
        // (dy, -dx), inside means (p - a) · (dy, -dx) <= 0.
        let e = b - a;
        let n = Point::new(e.y, -e.x);
        cur = clip_halfplane(&cur, n, n.dot(a));
        if cur.len() < 3 {
            return ConvexPolygon::empty();
        }
    }
    ConvexPolygon::new(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::from_rect(&Rect::UNIT)
    }

    #[test]
    fn area_unit_square() {
        assert_eq!(unit_square().area(), 1.0);
    }

    #[test]
    fn area_reference_triangle() {
        let t = ConvexPolygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ]);
        assert_eq!(t.area(), 0.5);
    }

    #[test]
    fn area_regular_hexagon() {
        let n = 6;
        let verts: Vec<Point> = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        let hex = ConvexPolygon::new(verts);
        let exact = 1.5 * 3.0f64.sqrt();
        assert!((hex.area() - exact).abs() < 1e-12);
    }

    #[test]
    fn clip_idempotent() {
        let s = unit_square();
        let r = clip_convex(&s, &s);
        assert!((r.area() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clip_overlapping_rectangles() {
        let a = unit_square();
        let b = ConvexPolygon::from_rect(&Rect::new(0.5, 0.0, 1.5, 1.0));
        let r = clip_convex(&a, &b);
        assert!((r.area() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn clip_disjoint_is_empty() {
        let a = unit_square();
        let b = ConvexPolygon::from_rect(&Rect::new(2.0, 2.0, 3.0, 3.0));
        let r = clip_convex(&a, &b);
        assert!(r.is_empty());
        assert_eq!(r.area(), 0.0);
    }

    #[test]
    fn clip_area_monotone() {
        // area(p ∩ q) <= min(area p, area q) over a deterministic sweep of
        // shifted/rotated quads.
        for k in 0..50 {
            let t = k as f64 * 0.13;
            let c = t.cos();
            let s = t.sin();
            let quad = ConvexPolygon::new(vec![
                Point::new(0.3 + 0.8 * c, 0.1 + 0.8 * s),
                Point::new(0.3 - 0.8 * s, 0.1 + 0.8 * c),
                Point::new(0.3 - 0.8 * c, 0.1 - 0.8 * s),
                Point::new(0.3 + 0.8 * s, 0.1 - 0.8 * c),
            ]);
            let sq = unit_square();
            let r = clip_convex(&sq, &quad);
            assert!(r.area() <= sq.area().min(quad.area()) + 1e-12);
            assert!(r.is_ccw_convex());
        }
    }

    #[test]
    fn centroid_of_square() {
        let c = unit_square().centroid();
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
    }
}
