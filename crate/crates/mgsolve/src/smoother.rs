//! Smoothers: scaled Richardson on the operator form, and the Additive
//! Schwarz preconditioner (per-cell local solves plus one coarse solve
//! through the non-nested prolongation) driven by a fixed number of PCG
//! steps.

use crate::level::LevelOperators;
use crate::MgError;
use sparsela::dense::{DenseCholesky, DenseMatrix};
use sparsela::vecops::{axpy, dot};
use sparsela::SparseCholesky;
use xfer::TransferPair;

/// `m` Richardson steps z ← z + (1/Λ) M^{-1}(g - K z) on the functional
/// system K z = g.
pub fn richardson_smooth(level: &LevelOperators, z: &mut [f64], g: &[f64], m: usize) {
    let inv_lambda = 1.0 / level.lambda_max;
    for _ in 0..m {
        let mut r = level.stiffness.mul_vec(z);
        for (ri, gi) in r.iter_mut().zip(g) {
            *ri = gi - *ri;
        }
        level.mass_factor.solve_into(&mut r);
        axpy(inv_lambda, &r, z);
    }
}

/// B_ad^{-1} = Σ_i E_i (K_ii)^{-1} E_i^T + I K_coarse^{-1} I^T, where E_i
/// extends cell i's DOF block by zero and I is the L2 prolongation from the
/// coarse level. Applied to residual functionals, returns function
/// coefficients.
pub struct AsPreconditioner {
    block_factors: Vec<DenseCholesky>,
    n_loc: usize,
    coarse_factor: SparseCholesky,
}

impl AsPreconditioner {
    pub fn build(level: &LevelOperators, coarse: &LevelOperators) -> Result<Self, MgError> {
        let n_loc = level.space.n_loc();
        let n_cells = level.space.n_cells();
        let k = &level.stiffness;
        let mut block_factors = Vec::with_capacity(n_cells);
        for c in 0..n_cells {
            let lo = c * n_loc;
            let mut block = DenseMatrix::zeros(n_loc, n_loc);
            for i in 0..n_loc {
                let (cols, vals) = k.row(lo + i);
                for (&j, &v) in cols.iter().zip(vals) {
                    let j = j as usize;
                    if j >= lo && j < lo + n_loc {
                        block.set(i, j - lo, v);
                    }
                }
            }
            block_factors.push(DenseCholesky::factor(&block)?);
        }
        let coarse_factor = SparseCholesky::factor(&coarse.stiffness)?;
        Ok(AsPreconditioner { block_factors, n_loc, coarse_factor })
    }

    /// s = B_ad^{-1} r for a residual functional r.
    pub fn apply(&self, transfer: &TransferPair, r: &[f64]) -> Vec<f64> {
        let n = r.len();
        let mut s = vec![0.0; n];
        for (c, f) in self.block_factors.iter().enumerate() {
            let lo = c * self.n_loc;
            let local = f.solve(&r[lo..lo + self.n_loc]);
            s[lo..lo + self.n_loc].copy_from_slice(&local);
        }
        // coarse contribution: I K_c^{-1} I^T r with I^T r = P^T M_f^{-1} r
        let rc = transfer.restrict_functional(r);
        let ec = self.coarse_factor.solve(&rc);
        let coarse = transfer.prolong(&ec);
        for i in 0..n {
            s[i] += coarse[i];
        }
        s
    }
}

/// Exactly `m` preconditioned CG steps on K z = g with B_ad, starting from
/// `z0`. No tolerance exit: a fixed step count keeps the smoothing operator
/// identical between outer iterations. Returns the iterate and a breakdown
/// flag (zero curvature met before completing the steps).
pub fn aspcg_smooth(
    level: &LevelOperators,
    prec: &AsPreconditioner,
    transfer: &TransferPair,
    z0: &[f64],
    g: &[f64],
    m: usize,
) -> (Vec<f64>, bool) {
    let mut z = z0.to_vec();
    if m == 0 {
        return (z, false);
    }
    let mut r = level.stiffness.mul_vec(&z);
    for (ri, gi) in r.iter_mut().zip(g) {
        *ri = gi - *ri;
    }
    if dot(&r, &r) == 0.0 {
        return (z, false);
    }
    let mut s = prec.apply(transfer, &r);
    let mut d = s.clone();
    let mut delta = dot(&r, &s);
    for _ in 0..m {
        let q = level.stiffness.mul_vec(&d);
        let curv = dot(&d, &q);
        if !(curv > 0.0) || !curv.is_finite() {
            return (z, true);
        }
        let alpha = delta / curv;
        axpy(alpha, &d, &mut z);
        axpy(-alpha, &q, &mut r);
        s = prec.apply(transfer, &r);
        let delta_new = dot(&r, &s);
        let beta = delta_new / delta;
        delta = delta_new;
        for i in 0..d.len() {
            d[i] = s[i] + beta * d[i];
        }
        if delta == 0.0 {
            break;
        }
    }
    (z, false)
}
