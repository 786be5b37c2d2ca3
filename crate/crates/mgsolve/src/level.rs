//! Per-level operators and the assembled multigrid stack.

use crate::eig::{estimate_lambda_max, LAMBDA_MAX_ITERS, LAMBDA_TOL};
use crate::smoother::AsPreconditioner;
use crate::MgError;
use dgcore::{assemble_dg_norm_gram, assemble_mass, assemble_stiffness, DgSpace};
use polymesh::MeshHierarchy;
use sparsela::{BlockDiagFactor, CsrMatrix, SparseCholesky};
use std::sync::Arc;
use xfer::TransferPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmootherKind {
    Richardson,
    AdditiveSchwarz,
}

/// Everything one level contributes: stiffness K, block mass M (with its
/// factor), the DG-norm Gram N, the spectral bound Λ and the penalty choice.
pub struct LevelOperators {
    pub space: Arc<DgSpace>,
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub mass_factor: BlockDiagFactor,
    pub gram: CsrMatrix,
    pub lambda_max: f64,
    pub lambda_converged: bool,
    pub c_sigma: f64,
}

impl LevelOperators {
    pub fn build(space: Arc<DgSpace>, c_sigma: f64) -> Result<Self, MgError> {
        let stiffness = assemble_stiffness(&space, c_sigma)?;
        let mass = assemble_mass(&space)?;
        let mass_factor = BlockDiagFactor::factor(&mass, &space.block_offsets())?;
        let gram = assemble_dg_norm_gram(&space, c_sigma)?;
        let est =
            estimate_lambda_max(&stiffness, &mass, &mass_factor, LAMBDA_TOL, LAMBDA_MAX_ITERS);
        Ok(LevelOperators {
            space,
            stiffness,
            mass,
            mass_factor,
            gram,
            lambda_max: est.lambda,
            lambda_converged: est.converged,
            c_sigma,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.space.n_dofs()
    }
}

/// The assembled V-cycle hierarchy, coarsest level first. Transfers connect
/// consecutive levels; the coarsest stiffness is factorized for the exact
/// base solve; Additive Schwarz data exists on every level above the base
/// when that smoother is selected.
pub struct LevelStack {
    pub levels: Vec<LevelOperators>,
    pub transfers: Vec<TransferPair>,
    pub smoother: SmootherKind,
    pub coarse_factor: SparseCholesky,
    pub as_precs: Vec<Option<AsPreconditioner>>,
}

impl LevelStack {
    /// Build from spaces ordered coarsest → finest.
    pub fn build(
        spaces: Vec<Arc<DgSpace>>,
        c_sigma: f64,
        smoother: SmootherKind,
    ) -> Result<Self, MgError> {
        if spaces.is_empty() {
            return Err(MgError::BadConfig("a stack needs at least one level".into()));
        }
        let mut levels = Vec::with_capacity(spaces.len());
        for s in &spaces {
            levels.push(LevelOperators::build(s.clone(), c_sigma)?);
        }
        let mut transfers = Vec::with_capacity(spaces.len().saturating_sub(1));
        for j in 1..spaces.len() {
            transfers.push(TransferPair::build(spaces[j].clone(), spaces[j - 1].clone())?);
        }
        let coarse_factor = SparseCholesky::factor(&levels[0].stiffness)?;
        let mut as_precs: Vec<Option<AsPreconditioner>> = Vec::with_capacity(levels.len());
        as_precs.push(None);
        for j in 1..levels.len() {
            if smoother == SmootherKind::AdditiveSchwarz {
                as_precs.push(Some(AsPreconditioner::build(&levels[j], &levels[j - 1])?));
            } else {
                as_precs.push(None);
            }
        }
        Ok(LevelStack { levels, transfers, smoother, coarse_factor, as_precs })
    }

    /// Build spaces over an independently generated mesh hierarchy.
    /// `degrees` lists the polynomial degree per level, coarsest first.
    pub fn from_hierarchy(
        hierarchy: &MeshHierarchy,
        degrees: &[usize],
        c_sigma: f64,
        smoother: SmootherKind,
    ) -> Result<Self, MgError> {
        if degrees.len() != hierarchy.n_levels() {
            return Err(MgError::BadConfig(format!(
                "{} degrees for {} levels",
                degrees.len(),
                hierarchy.n_levels()
            )));
        }
        let mut spaces = Vec::with_capacity(degrees.len());
        for (mesh, &p) in hierarchy.levels.iter().zip(degrees) {
            spaces.push(Arc::new(DgSpace::new(Arc::new(mesh.clone()), p)?));
        }
        Self::build(spaces, c_sigma, smoother)
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn finest(&self) -> &LevelOperators {
        self.levels.last().unwrap()
    }

    /// Transfer pair connecting level `j` (fine side) with `j-1`.
    pub fn transfer_below(&self, j: usize) -> &TransferPair {
        &self.transfers[j - 1]
    }
}
