//! Quadrature on the reference segment [-1,1] and the reference triangle
//! {(x,y): x,y >= 0, x+y <= 1}.
//!
//! Segment rules are Gauss–Legendre with nodes found by Newton iteration.
//! Triangle rules are collapsed tensor Gauss rules symmetrized over the
//! vertex-permutation group, which keeps every weight positive at any order.

use crate::{ConvexPolygon, Point};

/// A fixed quadrature rule. `P` is `f64` on the segment and `[f64; 2]` on
/// the triangle.
#[derive(Debug, Clone)]
pub struct QuadratureRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

pub type SegmentRule = QuadratureRule<f64>;
pub type TriangleRule = QuadratureRule<[f64; 2]>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadError {
    UnsupportedDegree { requested: usize, max: usize },
}

impl std::fmt::Display for QuadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuadError::UnsupportedDegree { requested, max } => {
                write!(f, "unsupported quadrature degree {requested} (supported: 1..={max})")
            }
        }
    }
}

impl std::error::Error for QuadError {}

pub const MAX_SEGMENT_DEGREE: usize = 41;
pub const MAX_TRIANGLE_DEGREE: usize = 20;

/// Legendre P_n and its derivative at `x`, by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    // P'_n(x) = n (x P_n - P_{n-1}) / (x^2 - 1), stable away from ±1.
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Gauss–Legendre rule on [-1,1], exact for polynomials up to `degree`.
pub fn segment_quadrature(degree: usize) -> Result<SegmentRule, QuadError> {
    if degree == 0 || degree > MAX_SEGMENT_DEGREE {
        return Err(QuadError::UnsupportedDegree { requested: degree, max: MAX_SEGMENT_DEGREE });
    }
    let n = degree / 2 + 1; // 2n - 1 >= degree
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton from the Chebyshev-based initial guess.
        let mut x =
            (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Store the pair symmetrically so the rule is exactly even.
        points[i] = -x.abs();
        points[n - 1 - i] = x.abs();
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    Ok(QuadratureRule { points, weights, exactness_degree: degree })
}

/// Symmetric positive rule on the reference triangle, exact up to `degree`.
pub fn triangle_quadrature(degree: usize) -> Result<TriangleRule, QuadError> {
    if degree == 0 || degree > MAX_TRIANGLE_DEGREE {
        return Err(QuadError::UnsupportedDegree { requested: degree, max: MAX_TRIANGLE_DEGREE });
    }
    if degree == 1 {
        return Ok(QuadratureRule {
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![0.5],
            exactness_degree: 1,
        });
    }
    if degree == 2 {
        return Ok(QuadratureRule {
            points: vec![
                [1.0 / 6.0, 1.0 / 6.0],
                [2.0 / 3.0, 1.0 / 6.0],
                [1.0 / 6.0, 2.0 / 3.0],
            ],
            weights: vec![1.0 / 6.0; 3],
            exactness_degree: 2,
        });
    }

    // Collapsed (Duffy) map of a tensor Gauss rule: x = u(1-v), y = v with
    // Jacobian (1-v). The u-degree of a total-degree-d integrand is <= d and
    // the v-degree <= d+1, so n = ceil((d+2)/2) Gauss points per direction
    // are exact.
    let n = (degree + 2).div_ceil(2);
    let gl = segment_quadrature(2 * n - 1)?;
    let mut base_pts: Vec<[f64; 2]> = Vec::with_capacity(n * n);
    let mut base_wts: Vec<f64> = Vec::with_capacity(n * n);
    for iu in 0..n {
        let u = 0.5 * (gl.points[iu] + 1.0);
        let wu = 0.5 * gl.weights[iu];
        for iv in 0..n {
            let v = 0.5 * (gl.points[iv] + 1.0);
            let wv = 0.5 * gl.weights[iv];
            base_pts.push([u * (1.0 - v), v]);
            base_wts.push(wu * wv * (1.0 - v));
        }
    }
    // Symmetrize over the 6 barycentric permutations; each map sends the
    // triangle onto itself with unit Jacobian, so exactness is preserved and
    // the rule becomes fully symmetric.
    let perms: [[usize; 3]; 6] =
        [[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];
    let mut points = Vec::with_capacity(6 * base_pts.len());
    let mut weights = Vec::with_capacity(6 * base_pts.len());
    for (pt, w) in base_pts.iter().zip(&base_wts) {
        let bary = [1.0 - pt[0] - pt[1], pt[0], pt[1]];
        for perm in &perms {
            points.push([bary[perm[1]], bary[perm[2]]]);
            weights.push(w / 6.0);
        }
    }
    Ok(QuadratureRule { points, weights, exactness_degree: degree })
}

/// Physical quadrature points and weights over a convex polygon, via the
/// centroid fan; weights carry the Jacobians and sum to the polygon area.
pub fn polygon_quadrature(
    poly: &ConvexPolygon,
    degree: usize,
) -> Result<(Vec<Point>, Vec<f64>), QuadError> {
    if poly.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let rule = triangle_quadrature(degree)?;
    let c = poly.centroid();
    let n = poly.vertices.len();
    let mut points = Vec::with_capacity(n * rule.points.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for i in 0..n {
        let a = poly.vertices[i];
        let b = poly.vertices[(i + 1) % n];
        // Affine map F(x,y) = c + x(a-c) + y(b-c); |J| = 2 |T|.
        let jac = (a - c).cross(b - c);
        for (pt, w) in rule.points.iter().zip(&rule.weights) {
            points.push(Point::new(
                c.x + pt[0] * (a.x - c.x) + pt[1] * (b.x - c.x),
                c.y + pt[0] * (a.y - c.y) + pt[1] * (b.y - c.y),
            ));
            weights.push(w * jac);
        }
    }
    Ok((points, weights))
}

/// Integrate `f` over a convex polygon, exactly for polynomials up to
/// `degree`.
pub fn integrate_on_polygon<F: FnMut(Point) -> f64>(
    poly: &ConvexPolygon,
    mut f: F,
    degree: usize,
) -> Result<f64, QuadError> {
    let (points, weights) = polygon_quadrature(poly, degree)?;
    Ok(points.iter().zip(&weights).map(|(p, w)| w * f(*p)).sum())
}
