//! DG function spaces: per-cell polynomial spaces of fixed total degree with
//! bases scaled on the cell bounding box.

use crate::DgError;
use geomkit::Rect;
use polymesh::PolyMesh;
use std::sync::Arc;

/// A discontinuous space: `P_p` on every cell, DOFs blocked cell by cell.
#[derive(Debug, Clone)]
pub struct DgSpace {
    pub mesh: Arc<PolyMesh>,
    pub degree: usize,
    /// Tensor-Legendre exponent pairs (a, b) with a + b <= degree, constant
    /// mode first.
    pub modes: Vec<(u32, u32)>,
    /// Per-cell bounding boxes used to scale the basis.
    pub boxes: Vec<Rect>,
}

impl DgSpace {
    pub fn new(mesh: Arc<PolyMesh>, degree: usize) -> Result<Self, DgError> {
        if degree < 1 {
            return Err(DgError::BadDegree(degree));
        }
        if !mesh.faces_extracted() {
            return Err(DgError::FacesMissing);
        }
        let mut modes = Vec::with_capacity((degree + 1) * (degree + 2) / 2);
        for total in 0..=degree as u32 {
            for a in (0..=total).rev() {
                modes.push((a, total - a));
            }
        }
        let boxes = mesh.cell_bbox.clone();
        Ok(DgSpace { mesh, degree, modes, boxes })
    }

    /// Local dimension dim P_p = (p+1)(p+2)/2.
    pub fn n_loc(&self) -> usize {
        self.modes.len()
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.n_cells()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_cells() * self.n_loc()
    }

    pub fn dof(&self, cell: usize, local: usize) -> usize {
        debug_assert!(local < self.n_loc());
        cell * self.n_loc() + local
    }

    /// Block boundaries [0, n_loc, 2 n_loc, ..., n_dofs] for the mass factor.
    pub fn block_offsets(&self) -> Vec<usize> {
        (0..=self.n_cells()).map(|c| c * self.n_loc()).collect()
    }

    /// Coefficients of the global constant 1 (the constant mode is 1).
    pub fn constant_one(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.n_dofs()];
        for c in 0..self.n_cells() {
            v[self.dof(c, 0)] = 1.0;
        }
        v
    }
}
