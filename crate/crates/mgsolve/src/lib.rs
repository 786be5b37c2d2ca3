//! Non-nested V-cycle multigrid for the DG Poisson system.
//!
//! Bookkeeping convention used throughout: right-hand sides and residuals
//! are carried as *functional* vectors (entries are pairings with basis
//! functions), while iterates are *function-coefficient* vectors. With a
//! block mass matrix M and stiffness K, the operator equation A z = g reads
//! K z = g in these variables, smoothers convert functionals to functions
//! through M^{-1} exactly where the operator A = M^{-1} K demands it, and
//! the coarse right-hand side of the V-cycle is P^T M^{-1} (g - K z).

pub mod cg;
pub mod diagnostics;
pub mod eig;
pub mod level;
pub mod report;
pub mod smoother;
pub mod vcycle;

pub use cg::cg_solve;
pub use diagnostics::{estimate_cstab, estimate_delta};
pub use eig::estimate_lambda_max;
pub use level::{LevelOperators, LevelStack, SmootherKind};
pub use report::SolveReport;
pub use smoother::{aspcg_smooth, richardson_smooth, AsPreconditioner};
pub use vcycle::{mg_solve, vcycle};

use dgcore::DgError;
use polymesh::MeshError;
use sparsela::LinAlgError;
use xfer::XferError;

#[derive(Debug)]
pub enum MgError {
    Dg(DgError),
    Mesh(MeshError),
    Xfer(XferError),
    LinAlg(LinAlgError),
    BadConfig(String),
}

impl std::fmt::Display for MgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MgError::Dg(e) => write!(f, "{e}"),
            MgError::Mesh(e) => write!(f, "{e}"),
            MgError::Xfer(e) => write!(f, "{e}"),
            MgError::LinAlg(e) => write!(f, "{e}"),
            MgError::BadConfig(msg) => write!(f, "bad solver configuration: {msg}"),
        }
    }
}

impl std::error::Error for MgError {}

impl From<DgError> for MgError {
    fn from(e: DgError) -> Self {
        MgError::Dg(e)
    }
}

impl From<MeshError> for MgError {
    fn from(e: MeshError) -> Self {
        MgError::Mesh(e)
    }
}

impl From<XferError> for MgError {
    fn from(e: XferError) -> Self {
        MgError::Xfer(e)
    }
}

impl From<LinAlgError> for MgError {
    fn from(e: LinAlgError) -> Self {
        MgError::LinAlg(e)
    }
}
