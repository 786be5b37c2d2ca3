//! L2 and DG-norm errors of a discrete solution against a manufactured
//! exact solution.

use crate::assemble::penalty_sigma;
use crate::basis::{eval_function, eval_gradient};
use crate::quad::{cell_quadrature, face_quadrature};
use crate::space::DgSpace;
use crate::DgError;
use geomkit::Point;

#[derive(Debug, Clone, Copy)]
pub struct ErrorNorms {
    pub l2: f64,
    pub dg: f64,
}

/// Quadrature evaluation (degree 2p+2 in cells, 2p+1 on faces) of
/// ‖u_h - u‖_L2 and the DG-norm error including jump terms. The exact
/// solution is assumed continuous, so interior error jumps reduce to jumps
/// of u_h; boundary jumps compare the trace of u_h against u.
pub fn error_norms<U, G>(
    space: &DgSpace,
    u_h: &[f64],
    u_exact: U,
    grad_exact: G,
    c_sigma: f64,
) -> Result<ErrorNorms, DgError>
where
    U: Fn(Point) -> f64,
    G: Fn(Point) -> Point,
{
    assert_eq!(u_h.len(), space.n_dofs());
    let mut l2_sq = 0.0;
    let mut grad_sq = 0.0;
    for c in 0..space.n_cells() {
        let q = cell_quadrature(&space.mesh, c, 2 * space.degree + 2)?;
        for (pt, w) in q.points.iter().zip(&q.weights) {
            let e = eval_function(space, u_h, c, *pt) - u_exact(*pt);
            let ge = eval_gradient(space, u_h, c, *pt) - grad_exact(*pt);
            l2_sq += w * e * e;
            grad_sq += w * ge.dot(ge);
        }
    }
    let mut jump_sq = 0.0;
    for (fid, face) in space.mesh.faces.iter().enumerate() {
        let fq = face_quadrature(&space.mesh, fid, 2 * space.degree + 1)?;
        let sigma = penalty_sigma(space, face, c_sigma);
        match face.neighbor {
            Some(nbr) => {
                for (pt, w) in fq.points.iter().zip(&fq.weights) {
                    let jump = eval_function(space, u_h, face.owner, *pt)
                        - eval_function(space, u_h, nbr, *pt);
                    jump_sq += w * sigma * jump * jump;
                }
            }
            None => {
                for (pt, w) in fq.points.iter().zip(&fq.weights) {
                    let e = eval_function(space, u_h, face.owner, *pt) - u_exact(*pt);
                    jump_sq += w * sigma * e * e;
                }
            }
        }
    }
    Ok(ErrorNorms { l2: l2_sq.sqrt(), dg: (grad_sq + jump_sq).sqrt() })
}
