//! Inter-level transfer between unrelated meshes.
//!
//! Nothing here assumes nesting. Prolongation is the L2 projection from the
//! coarse space into the fine space, realized through the mixed mass matrix
//! P[k][l] = (φ^coarse_l, φ^fine_k) integrated exactly over the geometric
//! supermesh (all pairwise cell intersections). Restriction is its L2
//! adjoint. Both reduce to block-diagonal mass solves around sparse products
//! with P, so applications are O(nnz).

pub mod supermesh;
pub mod transfer;

pub use supermesh::{build_supermesh, Supermesh, SupermeshPiece};
pub use transfer::{assemble_mixed_mass, p_coarse_projection, TransferPair};

use dgcore::DgError;
use polymesh::MeshError;
use sparsela::LinAlgError;

#[derive(Debug)]
pub enum XferError {
    /// A fine cell's intersections do not add up to its area.
    Conservation { fine_cell: usize, deficit_rel: f64 },
    DomainMismatch,
    Dg(DgError),
    Mesh(MeshError),
    LinAlg(LinAlgError),
}

impl std::fmt::Display for XferError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            XferError::Conservation { fine_cell, deficit_rel } => write!(
                f,
                "supermesh conservation failure on fine cell {fine_cell}: relative deficit {deficit_rel:.3e}"
            ),
            XferError::DomainMismatch => write!(f, "meshes do not tile the same domain"),
            XferError::Dg(e) => write!(f, "{e}"),
            XferError::Mesh(e) => write!(f, "{e}"),
            XferError::LinAlg(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for XferError {}

impl From<DgError> for XferError {
    fn from(e: DgError) -> Self {
        XferError::Dg(e)
    }
}

impl From<MeshError> for XferError {
    fn from(e: MeshError) -> Self {
        XferError::Mesh(e)
    }
}

impl From<LinAlgError> for XferError {
    fn from(e: LinAlgError) -> Self {
        XferError::LinAlg(e)
    }
}
