//! Discrete exterior calculus on general polygonal surface meshes.
//!
//! All operators act on *primal* cells only: discrete `k`-forms are real
//! vectors indexed by vertices, edges, or faces of a [`mesh::PolygonMesh`],
//! and every operator (exterior derivative, wedge product, Hodge star,
//! codifferential, Laplacian, contraction, Lie derivative) materializes as a
//! sparse matrix between those cochain spaces. No dual mesh and no
//! triangulation of the polygons is ever constructed.
//!
//! The crate is organized as:
//!
//! * [`mesh`] — polygonal surface meshes with oriented edges, per-face
//!   halfedge cycles, and incidence signs;
//! * [`surface`] — the analytic test surfaces (plane, sphere, torus);
//! * [`meshgen`] — regular/jittered/unstructured mesh generation over those
//!   surfaces;
//! * [`fields`] — analytic scalar/covector/2-form/vector fields;
//! * [`cochain`] — discrete forms, discretization by integration, flat and
//!   sharp operators, error norms;
//! * [`operators`] — assembly of all DEC operators as sparse matrices;
//! * [`sparse`] — the minimal sparse-matrix arithmetic and solvers backing
//!   the operators;
//! * [`apps`] — mean curvature flow, Helmholtz–Hodge decomposition, and Lie
//!   advection built on top of the operators;
//! * [`harness`] — convergence experiments: refinement ladders, error
//!   tables, log-log slope fits, scheme comparisons;
//! * [`io`] — OBJ/PLY mesh files, CSV cochains, Matrix Market operators.

pub mod apps;
pub mod cochain;
pub mod fields;
pub mod harness;
pub mod io;
pub mod mesh;
pub mod meshgen;
pub mod operators;
pub mod quadrature;
pub mod sparse;
pub mod surface;

/// 3D point / vector type used throughout.
pub type Vec3 = nalgebra::Vector3<f64>;

pub use cochain::{Cochain, VertexVectorField};
pub use fields::AnalyticField;
pub use mesh::{FaceGeometry, PolygonMesh};
pub use operators::{DecOperators, Scheme, SparseOperator};
pub use sparse::{CsrMatrix, SolveReport};
pub use surface::AnalyticSurface;
