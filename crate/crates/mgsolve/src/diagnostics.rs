//! Measured counterparts of the analysis quantities: the prolongation's
//! DG-norm operator bound C_stab and the V-cycle contraction δ.

use crate::level::LevelStack;
use crate::vcycle::vcycle;
use sparsela::vecops::dot;
use sparsela::{CsrMatrix, SparseCholesky, SplitMix64};
use xfer::TransferPair;

#[derive(Debug, Clone, Copy)]
pub struct EigEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// C_stab = sup ‖I v‖_{DG,fine} / ‖v‖_{DG,coarse}: square root of the top
/// generalized eigenvalue of (I^T N_fine I, N_coarse), by power iteration in
/// the N_coarse inner product with I applied matrix-free.
pub fn estimate_cstab(
    pair: &TransferPair,
    n_fine: &CsrMatrix,
    n_coarse: &CsrMatrix,
    tol: f64,
    max_iters: usize,
) -> Result<EigEstimate, sparsela::LinAlgError> {
    let coarse_factor = SparseCholesky::factor(n_coarse)?;
    let nc = n_coarse.nrows;
    let mut rng = SplitMix64::new(0xC57A_B000_0000_0001);
    let mut y = rng.vector(nc);
    let mut nrm = dot(&y, &n_coarse.mul_vec(&y)).sqrt();
    for v in y.iter_mut() {
        *v /= nrm;
    }
    let mut lam = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iters {
        iterations = it + 1;
        // rhs = I^T N_fine I y
        let iy = pair.prolong(&y);
        let niy = n_fine.mul_vec(&iy);
        let rhs = pair.restrict_functional(&niy);
        let lam_new = dot(&y, &rhs); // = ‖I y‖²_{N_fine}, y is N_c-normalized
        let z = coarse_factor.solve(&rhs);
        nrm = dot(&z, &n_coarse.mul_vec(&z)).sqrt();
        if nrm == 0.0 {
            lam = lam_new;
            break;
        }
        y = z;
        for v in y.iter_mut() {
            *v /= nrm;
        }
        if it > 0 && (lam_new - lam).abs() <= tol * lam_new.abs().max(1e-300) {
            lam = lam_new;
            converged = true;
            break;
        }
        lam = lam_new;
    }
    Ok(EigEstimate { value: lam.max(0.0).sqrt(), converged, iterations })
}

/// Contraction bound of the V-cycle error operator E = Id - B_MG^{-1} A on
/// level `j` (0-based) with m1 = m2 = m: dominant |eigenvalue| of the
/// K-self-adjoint E by power iteration in the K-inner product.
pub fn estimate_delta(
    stack: &LevelStack,
    j: usize,
    m: usize,
    tol: f64,
    max_iters: usize,
) -> EigEstimate {
    if j == 0 {
        // exact solve: the error operator is identically zero
        return EigEstimate { value: 0.0, converged: true, iterations: 0 };
    }
    let k = &stack.levels[j].stiffness;
    let n = stack.levels[j].n_dofs();
    let mut rng = SplitMix64::new(0xDE17_A000_0000_0007);
    let mut v = rng.vector(n);
    let mut nrm = dot(&v, &k.mul_vec(&v)).sqrt();
    for x in v.iter_mut() {
        *x /= nrm;
    }
    let apply_e = |v: &[f64]| -> Vec<f64> {
        let g = k.mul_vec(v);
        let zeros = vec![0.0; n];
        let binv_g = vcycle(stack, j, &g, zeros, m, m);
        v.iter().zip(&binv_g).map(|(vi, bi)| vi - bi).collect()
    };
    let mut lam = 0.0f64;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iters {
        iterations = it + 1;
        let w = apply_e(&v);
        let kw = k.mul_vec(&w);
        let lam_new = dot(&v, &kw); // signed Rayleigh quotient
        nrm = dot(&w, &kw).sqrt();
        if nrm == 0.0 || !nrm.is_finite() {
            lam = if nrm == 0.0 { 0.0 } else { lam_new };
            converged = nrm == 0.0;
            break;
        }
        v = w;
        for x in v.iter_mut() {
            *x /= nrm;
        }
        if it > 0 && (lam_new.abs() - lam.abs()).abs() <= tol * lam_new.abs().max(1e-300) {
            lam = lam_new;
            converged = true;
            break;
        }
        lam = lam_new;
    }
    EigEstimate { value: lam.abs(), converged, iterations }
}
