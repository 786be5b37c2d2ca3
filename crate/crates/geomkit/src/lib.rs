//! Planar computational geometry and quadrature kernels.
//!
//! Everything here is pure and allocation-light: 2D points, axis-aligned
//! rectangles, convex polygons with half-plane clipping, and fixed quadrature
//! rules on the reference triangle and the reference segment.

pub mod polygon;
pub mod quadrature;

pub use polygon::{clip_convex, clip_halfplane, ConvexPolygon};
pub use quadrature::{
    integrate_on_polygon, segment_quadrature, triangle_quadrature, QuadError, QuadratureRule,
};

/// Relative geometry tolerance used by orientation and degeneracy tests.
/// Callers scale it by a local length where appropriate.
pub const GEOM_EPS: f64 = 1e-12;

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product `self × o`.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// Axis-aligned rectangle, used for domains and bounding boxes.
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

    pub const UNIT: Rect = Rect { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 };

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn intersects(&self, o: &Rect) -> bool {
        self.x0 <= o.x1 && o.x0 <= self.x1 && self.y0 <= o.y1 && o.y0 <= self.y1
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x0, self.y0),
            Point::new(self.x1, self.y0),
            Point::new(self.x1, self.y1),
            Point::new(self.x0, self.y1),
        ]
    }

    /// Smallest rectangle containing all `pts`. Empty input gives a NaN box.
    pub fn hull_of(pts: &[Point]) -> Rect {
        let mut r = Rect::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN);
        for (i, p) in pts.iter().enumerate() {
            if i == 0 {
                r = Rect::new(p.x, p.y, p.x, p.y);
            } else {
                r.x0 = r.x0.min(p.x);
                r.y0 = r.y0.min(p.y);
                r.x1 = r.x1.max(p.x);
                r.y1 = r.y1.max(p.y);
            }
        }
        r
    }
}
