//! Convergence-experiment harness: refinement ladders, error tables,
//! log-log slope fits, and scheme comparisons.

pub mod catalog;
pub mod config;
pub mod convergence;

pub use catalog::FormCatalog;
pub use config::{
    default_ladder, parse_config_file, parse_config_str, ExperimentConfig, ExperimentOperator,
};
pub use convergence::{
    compare_schemes, fit_slope, run_convergence, ComparisonReport, ExperimentReport, LevelRow,
    SlopeFit,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown form {0:?} (see FormCatalog::form_names)")]
    UnknownForm(String),
    #[error("unknown vector field {0:?} (see FormCatalog::vector_field_names)")]
    UnknownVectorField(String),
    #[error("unknown operator {0:?}")]
    UnknownOperator(String),
    #[error("form {form:?} does not live on the configured surface")]
    SurfaceMismatch { form: String },
    #[error("no analytic reference for {operator} on {form:?}")]
    NoAnalyticReference { operator: String, form: String },
    #[error("slope fit needs positive data: {why} (got {got} usable points)")]
    InsufficientPoints { got: usize, why: &'static str },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    MeshGen(#[from] crate::meshgen::MeshGenError),
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
    #[error(transparent)]
    Cochain(#[from] crate::cochain::CochainError),
    #[error(transparent)]
    Operator(#[from] crate::operators::OperatorError),
}
