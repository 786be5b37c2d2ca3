//! Experiment front end: mesh generation, single solves, table reproduction,
//! and the stability/contraction estimator sweeps, all emitting CSV.

pub mod config;
pub mod runners;

pub use config::{DegreeSpec, ExperimentConfig, TableId};
pub use runners::{cmd_cstab, cmd_delta, cmd_mesh, cmd_solve, cmd_table};

use geomkit::Point;
use std::f64::consts::PI;

/// Manufactured solution u = sin(πx) sin(πy) on the unit square, zero on
/// the boundary.
pub fn mms_solution(p: Point) -> f64 {
    (PI * p.x).sin() * (PI * p.y).sin()
}

pub fn mms_gradient(p: Point) -> Point {
    Point::new(
        PI * (PI * p.x).cos() * (PI * p.y).sin(),
        PI * (PI * p.x).sin() * (PI * p.y).cos(),
    )
}

/// f = -Δu for the manufactured solution.
pub fn mms_forcing(p: Point) -> f64 {
    2.0 * PI * PI * mms_solution(p)
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Failed(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::Failed(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<polymesh::MeshError> for CliError {
    fn from(e: polymesh::MeshError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<mgsolve::MgError> for CliError {
    fn from(e: mgsolve::MgError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<dgcore::DgError> for CliError {
    fn from(e: dgcore::DgError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<xfer::XferError> for CliError {
    fn from(e: xfer::XferError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<sparsela::LinAlgError> for CliError {
    fn from(e: sparsela::LinAlgError) -> Self {
        CliError::Failed(e.to_string())
    }
}
