//! The V-cycle recursion and the outer iteration.

use crate::level::{LevelStack, SmootherKind};
use crate::report::SolveReport;
use crate::smoother::{aspcg_smooth, richardson_smooth};
use sparsela::vecops::norm2;

fn smooth(stack: &LevelStack, j: usize, z: &mut Vec<f64>, g: &[f64], m: usize) {
    match stack.smoother {
        SmootherKind::Richardson => richardson_smooth(&stack.levels[j], z, g, m),
        SmootherKind::AdditiveSchwarz => {
            let prec = stack.as_precs[j].as_ref().expect("AS data missing on level");
            let (out, _breakdown) =
                aspcg_smooth(&stack.levels[j], prec, stack.transfer_below(j), z, g, m);
            *z = out;
        }
    }
}

/// One V-cycle iteration on level `j` (0 = coarsest) for the functional
/// system K_j z = g: pre-smooth, restrict the residual functional, recurse
/// from a zero initial guess, prolong the correction, post-smooth. The base
/// level solves exactly and ignores the initial guess.
pub fn vcycle(
    stack: &LevelStack,
    j: usize,
    g: &[f64],
    z0: Vec<f64>,
    m1: usize,
    m2: usize,
) -> Vec<f64> {
    if j == 0 {
        return stack.coarse_factor.solve(g);
    }
    let level = &stack.levels[j];
    let mut z = z0;
    smooth(stack, j, &mut z, g, m1);

    // Coarse grid correction.
    let mut r = level.stiffness.mul_vec(&z);
    for (ri, gi) in r.iter_mut().zip(g) {
        *ri = gi - *ri;
    }
    let g_coarse = stack.transfer_below(j).restrict_functional(&r);
    let zeros = vec![0.0; stack.levels[j - 1].n_dofs()];
    let e = vcycle(stack, j - 1, &g_coarse, zeros, m1, m2);
    let correction = stack.transfer_below(j).prolong(&e);
    for (zi, ci) in z.iter_mut().zip(&correction) {
        *zi += ci;
    }

    smooth(stack, j, &mut z, g, m2);
    z
}

/// Residual growth past this multiple of the initial residual aborts the
/// iteration as divergent.
pub const DIVERGENCE_GUARD: f64 = 10.0;

/// Iterate full V-cycles until the Euclidean norm of the residual functional
/// drops below `tol` relative to the initial residual.
pub fn mg_solve(
    stack: &LevelStack,
    f: &[f64],
    tol: f64,
    max_iters: usize,
    m1: usize,
    m2: usize,
) -> (Vec<f64>, SolveReport) {
    let start = std::time::Instant::now();
    let top = stack.n_levels() - 1;
    let n = stack.finest().n_dofs();
    let mut u = vec![0.0; n];
    let r0 = norm2(f);
    let mut history = vec![r0];
    if r0 == 0.0 {
        return (u, SolveReport::from_history(history, true, false, start.elapsed()));
    }
    let mut converged = false;
    let mut diverged = false;
    for _ in 0..max_iters {
        u = vcycle(stack, top, f, u, m1, m2);
        let mut r = stack.finest().stiffness.mul_vec(&u);
        for (ri, fi) in r.iter_mut().zip(f) {
            *ri = fi - *ri;
        }
        let rn = norm2(&r);
        history.push(rn);
        if rn <= tol * r0 {
            converged = true;
            break;
        }
        if rn > DIVERGENCE_GUARD * r0 || !rn.is_finite() {
            diverged = true;
            break;
        }
    }
    (u, SolveReport::from_history(history, converged, diverged, start.elapsed()))
}
