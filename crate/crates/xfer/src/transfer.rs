//! The transfer pair: mixed mass over the supermesh, prolongation by L2
//! projection, restriction as its adjoint, and the stiffness-weighted
//! coarse projection used by diagnostics.

use crate::supermesh::{build_supermesh, Supermesh};
use crate::XferError;
use dgcore::assemble::assemble_mass;
use dgcore::basis::eval_basis_values;
use dgcore::space::DgSpace;
use geomkit::quadrature::polygon_quadrature;
use sparsela::{BlockDiagFactor, CsrMatrix, SparseCholesky, Triplets};
use std::sync::Arc;

/// Mixed mass P[k][l] = (φ^coarse_l, φ^fine_k), integrated piece by piece
/// with quadrature exact for products of both bases.
pub fn assemble_mixed_mass(
    fine: &DgSpace,
    coarse: &DgSpace,
    supermesh: &Supermesh,
) -> Result<CsrMatrix, XferError> {
    let nf = fine.n_loc();
    let nc = coarse.n_loc();
    let degree = fine.degree + coarse.degree + 2;
    let mut t = Triplets::new(fine.n_dofs(), coarse.n_dofs());
    let mut fv = vec![0.0; nf];
    let mut cv = vec![0.0; nc];
    let mut block = vec![0.0; nf * nc];
    for piece in &supermesh.pieces {
        let (pts, wts) =
            polygon_quadrature(&piece.polygon, degree).map_err(dgcore::DgError::from)?;
        block.iter_mut().for_each(|v| *v = 0.0);
        for (pt, w) in pts.iter().zip(&wts) {
            eval_basis_values(fine, piece.fine_cell, *pt, &mut fv);
            eval_basis_values(coarse, piece.coarse_cell, *pt, &mut cv);
            for k in 0..nf {
                let wf = w * fv[k];
                for l in 0..nc {
                    block[k * nc + l] += wf * cv[l];
                }
            }
        }
        for k in 0..nf {
            for l in 0..nc {
                t.push(
                    fine.dof(piece.fine_cell, k),
                    coarse.dof(piece.coarse_cell, l),
                    block[k * nc + l],
                );
            }
        }
    }
    Ok(t.to_csr())
}

/// Prolongation/restriction between one coarse and one fine space.
pub struct TransferPair {
    pub fine: Arc<DgSpace>,
    pub coarse: Arc<DgSpace>,
    pub mixed: CsrMatrix,
    pub mass_fine: BlockDiagFactor,
    pub mass_coarse: BlockDiagFactor,
}

impl TransferPair {
    pub fn build(fine: Arc<DgSpace>, coarse: Arc<DgSpace>) -> Result<Self, XferError> {
        let sm = build_supermesh(&fine.mesh, &coarse.mesh)?;
        Self::build_with_supermesh(fine, coarse, &sm)
    }

    pub fn build_with_supermesh(
        fine: Arc<DgSpace>,
        coarse: Arc<DgSpace>,
        supermesh: &Supermesh,
    ) -> Result<Self, XferError> {
        let mixed = assemble_mixed_mass(&fine, &coarse, supermesh)?;
        let mf = assemble_mass(&fine)?;
        let mc = assemble_mass(&coarse)?;
        let mass_fine = BlockDiagFactor::factor(&mf, &fine.block_offsets())?;
        let mass_coarse = BlockDiagFactor::factor(&mc, &coarse.block_offsets())?;
        Ok(TransferPair { fine, coarse, mixed, mass_fine, mass_coarse })
    }

    /// P v (fine functional of a coarse function).
    pub fn apply_mixed(&self, v_coarse: &[f64]) -> Vec<f64> {
        self.mixed.mul_vec(v_coarse)
    }

    /// P^T w (coarse functional of a fine function).
    pub fn apply_mixed_t(&self, w_fine: &[f64]) -> Vec<f64> {
        self.mixed.mul_transpose_vec(w_fine)
    }

    /// L2 projection of a coarse function into the fine space:
    /// M_fine^{-1} (P v).
    pub fn prolong(&self, v_coarse: &[f64]) -> Vec<f64> {
        let mut out = self.mixed.mul_vec(v_coarse);
        self.mass_fine.solve_into(&mut out);
        out
    }

    /// L2 adjoint of the prolongation: M_coarse^{-1} (P^T w). The input is a
    /// function-coefficient (Riesz) vector, not a functional.
    pub fn restrict(&self, w_fine: &[f64]) -> Vec<f64> {
        let mut out = self.mixed.mul_transpose_vec(w_fine);
        self.mass_coarse.solve_into(&mut out);
        out
    }

    /// Restriction of a residual functional to a coarse functional:
    /// P^T M_fine^{-1} r. This is the V-cycle's coarse right-hand side.
    pub fn restrict_functional(&self, r_fine: &[f64]) -> Vec<f64> {
        let riesz = self.mass_fine.solve(r_fine);
        self.mixed.mul_transpose_vec(&riesz)
    }
}

/// The stiffness-weighted coarse projection: solves
/// A_coarse (P w) = (prolongation^T applied to A_fine w), i.e. the coarse
/// function whose coarse-form action matches the fine function's action on
/// prolonged test functions. Diagnostics only; requires a factored K_coarse.
pub fn p_coarse_projection(
    pair: &TransferPair,
    k_fine: &CsrMatrix,
    k_coarse_factor: &SparseCholesky,
    w_fine: &[f64],
) -> Vec<f64> {
    let kw = k_fine.mul_vec(w_fine);
    let riesz = pair.mass_fine.solve(&kw);
    let rhs = pair.mixed.mul_transpose_vec(&riesz);
    k_coarse_factor.solve(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dgcore::assemble_stiffness;
    use geomkit::Rect;
    use polymesh::generate_voronoi_mesh;
    use sparsela::rng::SplitMix64;
    use sparsela::vecops::dot;

    fn space(n_cells: usize, p: usize, seed: u64) -> Arc<DgSpace> {
        let mesh = Arc::new(generate_voronoi_mesh(&Rect::UNIT, n_cells, seed, 5).unwrap());
        Arc::new(DgSpace::new(mesh, p).unwrap())
    }

    #[test]
    fn identical_spaces_mixed_mass_is_mass() {
        let s = space(12, 2, 3);
        let pair = TransferPair::build(s.clone(), s.clone()).unwrap();
        let m = assemble_mass(&s).unwrap();
        assert_eq!(pair.mixed.nrows, m.nrows);
        let scale = m.max_abs();
        for i in 0..m.nrows {
            let (cols, vals) = m.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                assert!(
                    (pair.mixed.get(i, j as usize) - v).abs() < 1e-12 * scale,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn constant_block_entries_are_intersection_areas() {
        let f = space(20, 1, 5);
        let c = space(5, 1, 6);
        let sm = build_supermesh(&f.mesh, &c.mesh).unwrap();
        let p = assemble_mixed_mass(&f, &c, &sm).unwrap();
        for piece in &sm.pieces {
            let got = p.get(f.dof(piece.fine_cell, 0), c.dof(piece.coarse_cell, 0));
            assert!((got - piece.area).abs() < 1e-13, "{got} vs {}", piece.area);
        }
    }

    #[test]
    fn row_sum_identity_for_constants() {
        // P · 1_coarse = M_fine · 1_fine, both being (1, φ^fine_k).
        let f = space(48, 2, 7);
        let c = space(12, 2, 8);
        let pair = TransferPair::build(f.clone(), c.clone()).unwrap();
        let m_fine = assemble_mass(&f).unwrap();
        let lhs = pair.apply_mixed(&c.constant_one());
        let rhs = m_fine.mul_vec(&f.constant_one());
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn prolongation_preserves_constants_and_identity() {
        let f = space(40, 2, 9);
        let c = space(10, 2, 10);
        let pair = TransferPair::build(f.clone(), c.clone()).unwrap();
        let one_f = pair.prolong(&c.constant_one());
        for (c_idx, expect) in f.constant_one().iter().enumerate() {
            assert!((one_f[c_idx] - expect).abs() < 1e-10);
        }
        // identical spaces: prolong is the identity
        let same = TransferPair::build(f.clone(), f.clone()).unwrap();
        let mut rng = SplitMix64::new(1);
        let v = rng.vector(f.n_dofs());
        let pv = same.prolong(&v);
        for (a, b) in pv.iter().zip(&v) {
            assert!((a - b).abs() < 1e-13 * (1.0 + b.abs()));
        }
        // restrict ∘ prolong is the identity on the same space
        let rp = same.restrict(&pv);
        for (a, b) in rp.iter().zip(&v) {
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn adjoint_identity_on_random_vectors() {
        // (restrict w, v)_{M_coarse} = (w, prolong v)_{M_fine}
        let f = space(64, 2, 11);
        let c = space(16, 2, 12);
        let pair = TransferPair::build(f.clone(), c.clone()).unwrap();
        let m_f = assemble_mass(&f).unwrap();
        let m_c = assemble_mass(&c).unwrap();
        let mut rng = SplitMix64::new(2);
        for _ in 0..5 {
            let w = rng.vector(f.n_dofs());
            let v = rng.vector(c.n_dofs());
            let lhs = dot(&pair.restrict(&w), &m_c.mul_vec(&v));
            let rhs = dot(&w, &m_f.mul_vec(&pair.prolong(&v)));
            let scale = lhs.abs().max(rhs.abs()).max(1e-6);
            assert!((lhs - rhs).abs() <= 1e-12 * scale, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn projection_is_l2_optimal() {
        // ‖Iv - v‖_L2 <= ‖w - v‖_L2 for any fine candidate w.
        let f = space(32, 1, 13);
        let c = space(8, 1, 14);
        let pair = TransferPair::build(f.clone(), c.clone()).unwrap();
        let m_f = assemble_mass(&f).unwrap();
        let m_c = assemble_mass(&c).unwrap();
        let mut rng = SplitMix64::new(3);
        let v = rng.vector(c.n_dofs());
        let iv = pair.prolong(&v);
        let cross = |x: &[f64]| dot(x, &pair.apply_mixed(&v));
        let best = dot(&iv, &m_f.mul_vec(&iv)) - 2.0 * cross(&iv) + dot(&v, &m_c.mul_vec(&v));
        for _ in 0..20 {
            let w = rng.vector(f.n_dofs());
            let dist = dot(&w, &m_f.mul_vec(&w)) - 2.0 * cross(&w) + dot(&v, &m_c.mul_vec(&v));
            assert!(best <= dist + 1e-12);
        }
    }

    #[test]
    fn coarse_projection_identity_and_defining_relation() {
        let f = space(32, 1, 15);
        let c = space(8, 1, 16);
        let pair = TransferPair::build(f.clone(), c.clone()).unwrap();
        let kf = assemble_stiffness(&f, 10.0).unwrap();
        let kc = assemble_stiffness(&c, 10.0).unwrap();
        let kc_factor = SparseCholesky::factor(&kc).unwrap();
        let mut rng = SplitMix64::new(4);
        // defining identity: A_c(Pw, v) = A_f(w, Iv)
        for _ in 0..10 {
            let w = rng.vector(f.n_dofs());
            let v = rng.vector(c.n_dofs());
            let pw = p_coarse_projection(&pair, &kf, &kc_factor, &w);
            let lhs = dot(&pw, &kc.mul_vec(&v));
            let rhs = dot(&w, &kf.mul_vec(&pair.prolong(&v)));
            let scale = (dot(&w, &kf.mul_vec(&w)) * dot(&v, &kc.mul_vec(&v))).sqrt();
            assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1e-9), "{lhs} vs {rhs}");
        }
        // identical spaces: P is the identity
        let same = TransferPair::build(f.clone(), f.clone()).unwrap();
        let kf_factor = SparseCholesky::factor(&kf).unwrap();
        let w = rng.vector(f.n_dofs());
        let pw = p_coarse_projection(&same, &kf, &kf_factor, &w);
        for (a, b) in pw.iter().zip(&w) {
            assert!((a - b).abs() <= 1e-11 * (1.0 + b.abs()), "{a} vs {b}");
        }
        // energy stability: the sampled Rayleigh ratio stays finite
        let w = rng.vector(f.n_dofs());
        let pw = p_coarse_projection(&pair, &kf, &kc_factor, &w);
        let ratio = dot(&pw, &kc.mul_vec(&pw)) / dot(&w, &kf.mul_vec(&w));
        assert!(ratio.is_finite() && ratio >= 0.0, "energy ratio {ratio}");
    }
}
