//! Bounding-box tensor-Legendre basis evaluation.
//!
//! On a cell with box [x0,x1]x[y0,y1] the modes are P_a(ξ) P_b(η) with
//! ξ = (2x - x0 - x1)/(x1 - x0), η likewise, restricted to total degree
//! a + b <= p. The constant mode is identically 1, which keeps constant
//! coefficients human-readable and mass rows summable by eye.

use crate::space::DgSpace;
use geomkit::Point;

/// Legendre values P_0..P_n and derivatives at `x`, by the recurrences
/// (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1} and
/// P'_{k+1} = P'_{k-1} + (2k+3 ... ) — implemented via the stable pair form.
pub fn legendre_all(n: usize, x: f64, vals: &mut [f64], derivs: &mut [f64]) {
    debug_assert!(vals.len() > n && derivs.len() > n);
    vals[0] = 1.0;
    derivs[0] = 0.0;
    if n == 0 {
        return;
    }
    vals[1] = x;
    derivs[1] = 1.0;
    for k in 1..n {
        let kf = k as f64;
        vals[k + 1] = ((2.0 * kf + 1.0) * x * vals[k] - kf * vals[k - 1]) / (kf + 1.0);
        derivs[k + 1] = derivs[k - 1] + (2.0 * kf + 1.0) * vals[k];
    }
}

/// Values of all local basis functions of `space` on `cell` at `point`.
pub fn eval_basis_values(space: &DgSpace, cell: usize, point: Point, out: &mut [f64]) {
    let p = space.degree;
    let b = &space.boxes[cell];
    let xi = (2.0 * point.x - b.x0 - b.x1) / b.width();
    let eta = (2.0 * point.y - b.y0 - b.y1) / b.height();
    let mut px = [0.0; 16];
    let mut dx = [0.0; 16];
    let mut py = [0.0; 16];
    let mut dy = [0.0; 16];
    legendre_all(p, xi, &mut px, &mut dx);
    legendre_all(p, eta, &mut py, &mut dy);
    for (m, &(a, bb)) in space.modes.iter().enumerate() {
        out[m] = px[a as usize] * py[bb as usize];
    }
}

/// Values and physical gradients of all local basis functions.
pub fn eval_basis(space: &DgSpace, cell: usize, point: Point, vals: &mut [f64], grads: &mut [Point]) {
    let p = space.degree;
    let b = &space.boxes[cell];
    let sx = 2.0 / b.width();
    let sy = 2.0 / b.height();
    let xi = (2.0 * point.x - b.x0 - b.x1) / b.width();
    let eta = (2.0 * point.y - b.y0 - b.y1) / b.height();
    let mut px = [0.0; 16];
    let mut dx = [0.0; 16];
    let mut py = [0.0; 16];
    let mut dy = [0.0; 16];
    legendre_all(p, xi, &mut px, &mut dx);
    legendre_all(p, eta, &mut py, &mut dy);
    for (m, &(a, bb)) in space.modes.iter().enumerate() {
        let (a, bb) = (a as usize, bb as usize);
        vals[m] = px[a] * py[bb];
        grads[m] = Point::new(dx[a] * py[bb] * sx, px[a] * dy[bb] * sy);
    }
}

/// Evaluate the DG function with coefficient vector `u` at a point of `cell`.
pub fn eval_function(space: &DgSpace, u: &[f64], cell: usize, point: Point) -> f64 {
    let n_loc = space.n_loc();
    let mut vals = vec![0.0; n_loc];
    eval_basis_values(space, cell, point, &mut vals);
    let mut s = 0.0;
    for l in 0..n_loc {
        s += u[space.dof(cell, l)] * vals[l];
    }
    s
}

/// Evaluate the broken gradient of `u` at a point of `cell`.
pub fn eval_gradient(space: &DgSpace, u: &[f64], cell: usize, point: Point) -> Point {
    let n_loc = space.n_loc();
    let mut vals = vec![0.0; n_loc];
    let mut grads = vec![Point::new(0.0, 0.0); n_loc];
    eval_basis(space, cell, point, &mut vals, &mut grads);
    let mut g = Point::new(0.0, 0.0);
    for l in 0..n_loc {
        let c = u[space.dof(cell, l)];
        g = g + grads[l].scale(c);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use geomkit::Rect;
    use polymesh::generate_voronoi_mesh;
    use std::sync::Arc;

    fn space_on(n_cells: usize, p: usize, seed: u64) -> DgSpace {
        let mesh = Arc::new(generate_voronoi_mesh(&Rect::UNIT, n_cells, seed, 3).unwrap());
        DgSpace::new(mesh, p).unwrap()
    }

    #[test]
    fn constant_mode_is_one_with_zero_gradient() {
        let s = space_on(6, 3, 2);
        let n_loc = s.n_loc();
        let mut vals = vec![0.0; n_loc];
        let mut grads = vec![Point::new(0.0, 0.0); n_loc];
        for c in 0..s.n_cells() {
            let pt = s.mesh.cell_centroid[c];
            eval_basis(&s, c, pt, &mut vals, &mut grads);
            assert_eq!(vals[0], 1.0);
            assert_eq!(grads[0].x, 0.0);
            assert_eq!(grads[0].y, 0.0);
        }
    }

    #[test]
    fn gradients_match_central_differences() {
        // |∂φ - finite difference| <= 1e-6 at h = 1e-5 for p <= 4.
        let h = 1e-5;
        for p in 1..=4 {
            let s = space_on(5, p, 7);
            let n_loc = s.n_loc();
            let mut vals = vec![0.0; n_loc];
            let mut grads = vec![Point::new(0.0, 0.0); n_loc];
            let mut vp = vec![0.0; n_loc];
            let mut vm = vec![0.0; n_loc];
            for c in 0..s.n_cells() {
                let pt = s.mesh.cell_centroid[c];
                eval_basis(&s, c, pt, &mut vals, &mut grads);
                eval_basis_values(&s, c, Point::new(pt.x + h, pt.y), &mut vp);
                eval_basis_values(&s, c, Point::new(pt.x - h, pt.y), &mut vm);
                for m in 0..n_loc {
                    let fd = (vp[m] - vm[m]) / (2.0 * h);
                    assert!(
                        (grads[m].x - fd).abs() <= 1e-6,
                        "p={p} cell={c} mode={m}: dx {} vs fd {fd}",
                        grads[m].x
                    );
                }
                eval_basis_values(&s, c, Point::new(pt.x, pt.y + h), &mut vp);
                eval_basis_values(&s, c, Point::new(pt.x, pt.y - h), &mut vm);
                for m in 0..n_loc {
                    let fd = (vp[m] - vm[m]) / (2.0 * h);
                    assert!((grads[m].y - fd).abs() <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn legendre_values_standard() {
        let mut v = [0.0; 16];
        let mut d = [0.0; 16];
        legendre_all(4, 0.5, &mut v, &mut d);
        assert!((v[2] - (3.0 * 0.25 - 1.0) / 2.0).abs() < 1e-15);
        assert!((v[3] - (5.0 * 0.125 - 3.0 * 0.5) / 2.0).abs() < 1e-15);
        // P_n(1) = 1
        legendre_all(6, 1.0, &mut v, &mut d);
        for k in 0..=6 {
            assert!((v[k] - 1.0).abs() < 1e-14);
        }
    }
}
