//! Unpreconditioned conjugate gradients, the iteration-count baseline the
//! multigrid results are contrasted against.

use crate::report::SolveReport;
use sparsela::vecops::{axpy, dot, norm2};
use sparsela::CsrMatrix;

pub fn cg_solve(
    k: &CsrMatrix,
    b: &[f64],
    tol: f64,
    max_iters: usize,
) -> (Vec<f64>, SolveReport) {
    let start = std::time::Instant::now();
    let n = b.len();
    let mut x = vec![0.0; n];
    let r0 = norm2(b);
    let mut history = vec![r0];
    if r0 == 0.0 {
        return (x, SolveReport::from_history(history, true, false, start.elapsed()));
    }
    let mut r = b.to_vec();
    let mut d = r.clone();
    let mut rr = dot(&r, &r);
    let mut converged = false;
    for _ in 0..max_iters {
        let q = k.mul_vec(&d);
        let curv = dot(&d, &q);
        if !(curv > 0.0) || !curv.is_finite() {
            break;
        }
        let alpha = rr / curv;
        axpy(alpha, &d, &mut x);
        axpy(-alpha, &q, &mut r);
        let rr_new = dot(&r, &r);
        history.push(rr_new.sqrt());
        if rr_new.sqrt() <= tol * r0 {
            converged = true;
            break;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            d[i] = r[i] + beta * d[i];
        }
    }
    (x, SolveReport::from_history(history, converged, false, start.elapsed()))
}
