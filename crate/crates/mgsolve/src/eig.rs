//! Largest generalized eigenvalue of the pencil (K, M) by power iteration on
//! M^{-1} K in the M-inner product. This is the spectral bound that scales
//! the Richardson smoother.

use sparsela::vecops::dot;
use sparsela::{BlockDiagFactor, CsrMatrix, SplitMix64};

/// Multiplied onto the raw estimate so the smoother bound stays above the
/// true spectrum even when the iteration stops early.
pub const LAMBDA_SAFETY: f64 = 1.1;

pub const LAMBDA_TOL: f64 = 1e-4;
pub const LAMBDA_MAX_ITERS: usize = 500;

#[derive(Debug, Clone, Copy)]
pub struct LambdaEstimate {
    /// Safety-scaled estimate, ready for the smoother.
    pub lambda: f64,
    /// Raw power-iteration value before the safety factor.
    pub raw: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub fn estimate_lambda_max(
    k: &CsrMatrix,
    m: &CsrMatrix,
    m_factor: &BlockDiagFactor,
    tol: f64,
    max_iters: usize,
) -> LambdaEstimate {
    let n = k.nrows;
    let mut rng = SplitMix64::new(0x517C_C1B7_2722_0A95);
    let mut x = rng.vector(n);
    // normalize in the M-inner product
    let mut mx = m.mul_vec(&x);
    let mut nrm = dot(&x, &mx).sqrt();
    for v in x.iter_mut() {
        *v /= nrm;
    }
    let mut lam = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iters {
        iterations = it + 1;
        let kx = k.mul_vec(&x);
        let lam_new = dot(&x, &kx); // Rayleigh quotient, x is M-normalized
        let y = m_factor.solve(&kx);
        mx = m.mul_vec(&y);
        nrm = dot(&y, &mx).sqrt();
        if nrm == 0.0 {
            lam = lam_new;
            break;
        }
        x = y;
        for v in x.iter_mut() {
            *v /= nrm;
        }
        if it > 0 && (lam_new - lam).abs() <= tol * lam_new.abs().max(1e-300) {
            lam = lam_new;
            converged = true;
            break;
        }
        lam = lam_new;
    }
    LambdaEstimate { lambda: LAMBDA_SAFETY * lam, raw: lam, converged, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sparsela::Triplets;

    #[test]
    fn identity_pencil_gives_one() {
        // K = M = diag blocks: the operator is the identity.
        let n = 12;
        let mut t = Triplets::new(n, n);
        for i in 0..n {
            t.push(i, i, 2.0 + (i % 3) as f64);
        }
        let a = t.to_csr();
        let offsets: Vec<usize> = (0..=n).collect();
        let f = BlockDiagFactor::factor(&a, &offsets).unwrap();
        let est = estimate_lambda_max(&a, &a, &f, 1e-6, 100);
        assert!(est.converged);
        assert!((est.raw - 1.0).abs() < 1e-6, "raw {}", est.raw);
        assert!((est.lambda - 1.1).abs() < 1e-5);
    }
}
