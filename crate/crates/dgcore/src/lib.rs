//! Discontinuous Galerkin spaces on polygonal meshes and assembly of the
//! symmetric interior-penalty operator in lifted form.
//!
//! Per level the solver needs: a block-diagonal mass matrix, the stiffness
//! matrix realizing the lifted bilinear form
//!
//! ```text
//! A(u,v) = Σ_κ ∫_κ (∇u + R([[u]])) · (∇v + R([[v]])) dx + Σ_F ∫_F σ [[u]]·[[v]] ds
//! ```
//!
//! the broken-gradient + jump-penalty Gram matrix (the DG norm, which by
//! definition carries no lifting terms), load vectors, and error norms
//! against manufactured solutions. Homogeneous Dirichlet data enters weakly
//! through the boundary faces; no DOFs are eliminated.

pub mod assemble;
pub mod basis;
pub mod error_norms;
pub mod quad;
pub mod space;

pub use assemble::{
    assemble_dg_norm_gram, assemble_lifting, assemble_mass, assemble_rhs, assemble_stiffness,
    penalty_sigma, FaceLifting, LocalMass,
};
pub use error_norms::{error_norms, ErrorNorms};
pub use space::DgSpace;

use polymesh::MeshError;
use sparsela::LinAlgError;

pub const DEFAULT_C_SIGMA: f64 = 10.0;

#[derive(Debug)]
pub enum DgError {
    BadDegree(usize),
    FacesMissing,
    Mesh(MeshError),
    LinAlg(LinAlgError),
    Quad(geomkit::QuadError),
}

impl std::fmt::Display for DgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DgError::BadDegree(p) => write!(f, "polynomial degree {p} not supported (need >= 1)"),
            DgError::FacesMissing => write!(f, "mesh faces must be extracted before assembly"),
            DgError::Mesh(e) => write!(f, "{e}"),
            DgError::LinAlg(e) => write!(f, "{e}"),
            DgError::Quad(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DgError {}

impl From<MeshError> for DgError {
    fn from(e: MeshError) -> Self {
        DgError::Mesh(e)
    }
}

impl From<LinAlgError> for DgError {
    fn from(e: LinAlgError) -> Self {
        DgError::LinAlg(e)
    }
}

impl From<geomkit::QuadError> for DgError {
    fn from(e: geomkit::QuadError) -> Self {
        DgError::Quad(e)
    }
}
