//! Two-component Helmholtz–Hodge decomposition ω = δβ + γ of a 1-cochain:
//! the 2-form potential β solves dδβ = dω in the minimal-norm least-squares
//! sense, the coexact part is δβ, and the harmonic candidate is the exact
//! remainder γ = ω − δβ.

use crate::cochain::Cochain;
use crate::mesh::PolygonMesh;
use crate::operators::{codifferential, exterior_derivative, Scheme};
use crate::sparse::{solve, SolveMethod, SolveOptions, SolveReport};

use super::AppError;

#[derive(Debug)]
pub struct HhdResult {
    /// Rotational (coexact) part δβ.
    pub rotational: Cochain,
    /// Harmonic candidate γ = ω − δβ; closed up to the solver tolerance.
    pub harmonic: Cochain,
    /// 2-form potential β (minimal-norm solution).
    pub potential: Cochain,
    /// ‖dγ‖ in the M₂ norm (closedness residual).
    pub closedness_m2: f64,
    pub report: SolveReport,
}

/// Decompose a 1-cochain. The |F|×|F| system d₁δ₂ has a kernel (constants
/// on faces can be), so it is solved in least-squares mode; starting from
/// zero makes β the minimal-norm pick and the result deterministic.
pub fn helmholtz_hodge(
    mesh: &PolygonMesh,
    omega: &Cochain,
    solve_options: &SolveOptions,
) -> Result<HhdResult, AppError> {
    if omega.degree() != 1 {
        return Err(AppError::UnsupportedDegree(omega.degree()));
    }
    let d1 = exterior_derivative(mesh, 1)?;
    let delta2 = codifferential(mesh, 2, Scheme::Ours)?;
    let system = d1.matrix().multiply(delta2.matrix())?;
    let b = d1.apply(omega)?;
    let mut options = solve_options.clone();
    options.method = SolveMethod::LeastSquares;
    let (beta_values, report) = solve(&system, b.values(), &options)?;
    let potential = Cochain::from_values(mesh, 2, beta_values)?;
    let rotational = delta2.apply(&potential)?;
    let harmonic = omega.add_scaled(&rotational, -1.0)?;
    let d_gamma = d1.apply(&harmonic)?;
    let mut closedness = 0.0;
    for f in 0..mesh.num_faces() {
        closedness += d_gamma[f] * d_gamma[f] / mesh.face_geometry(f)?.area;
    }
    Ok(HhdResult {
        rotational,
        harmonic,
        potential,
        closedness_m2: closedness.sqrt(),
        report,
    })
}
