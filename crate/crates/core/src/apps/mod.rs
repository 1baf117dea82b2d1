//! Applications built on the DEC operators: implicit mean curvature flow,
//! two-component Helmholtz–Hodge decomposition, and Lie advection.

pub mod advect;
pub mod hhd;
pub mod mcf;

use thiserror::Error;

pub use advect::{lie_advect, AdvectionConfig, AdvectionOutcome, AdvectionRun};
pub use hhd::{helmholtz_hodge, HhdResult};
pub use mcf::{mean_curvature_flow, dirichlet_energy, FlowConfig, FlowResult};

#[derive(Debug, Error)]
pub enum AppError {
    #[error("solver failed at iteration {iteration}: residual {residual:e}")]
    SolverFailure { iteration: usize, residual: f64 },
    #[error("face {face} collapsed below the degeneracy threshold at iteration {iteration}")]
    GeometryCollapse { face: usize, iteration: usize },
    #[error("degree {0} is not supported here")]
    UnsupportedDegree(usize),
    #[error(transparent)]
    Operator(#[from] crate::operators::OperatorError),
    #[error(transparent)]
    Cochain(#[from] crate::cochain::CochainError),
    #[error(transparent)]
    Sparse(#[from] crate::sparse::SparseError),
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
}
