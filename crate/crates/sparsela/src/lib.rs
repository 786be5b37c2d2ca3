//! Minimal shared linear algebra: CSR matrices, a sparse Cholesky solver for
//! the coarse/direct solves, block-diagonal mass factorization, dense
//! reference routines, and small vector helpers.
//!
//! Everything is deterministic: fixed accumulation orders, no threading.

pub mod blockdiag;
pub mod chol;
pub mod csr;
pub mod dense;
pub mod mm;
pub mod rng;
pub mod vecops;

pub use blockdiag::BlockDiagFactor;
pub use chol::SparseCholesky;
pub use csr::{CsrMatrix, Triplets};
pub use dense::DenseMatrix;
pub use rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    DimensionMismatch { expected: usize, got: usize },
    NotPositiveDefinite { row: usize },
    Io(String),
    Parse(String),
}

impl std::fmt::Display for LinAlgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LinAlgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            LinAlgError::NotPositiveDefinite { row } => {
                write!(f, "matrix is not positive definite (pivot failure at row {row})")
            }
            LinAlgError::Io(msg) => write!(f, "i/o error: {msg}"),
            LinAlgError::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for LinAlgError {}
