//! Lie advection by plain forward Euler: β_{k+1} = β_k − t·L_X β_k.
//!
//! The Lie derivative is pre-composed into a single sparse matrix, so one
//! iteration is one matvec. Stability is the caller's responsibility
//! (t·‖L_X‖ must be small); any value exceeding the blow-up threshold
//! aborts the run and the partial results are returned.

use crate::cochain::Cochain;
use crate::mesh::PolygonMesh;
use crate::operators::lie_operator;

use super::AppError;

/// Values beyond this magnitude abort the run.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct AdvectionConfig {
    pub time_step: f64,
    pub iterations: usize,
    /// Record a snapshot every this many iterations (0 = only the final
    /// state). The final state is always recorded.
    pub snapshot_every: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdvectionOutcome {
    Completed,
    /// Aborted at the given iteration; snapshots hold the partial history.
    Blowup { at_iteration: usize },
}

#[derive(Debug)]
pub struct AdvectionRun {
    /// (iteration, state) pairs in iteration order.
    pub snapshots: Vec<(usize, Cochain)>,
    pub outcome: AdvectionOutcome,
}

impl AdvectionRun {
    pub fn final_state(&self) -> &Cochain {
        &self.snapshots.last().expect("at least one snapshot").1
    }
}

/// Advect a 0- or 1-cochain along the fixed discrete field X♭.
pub fn lie_advect(
    mesh: &PolygonMesh,
    x_flat: &Cochain,
    alpha0: &Cochain,
    config: &AdvectionConfig,
) -> Result<AdvectionRun, AppError> {
    let degree = alpha0.degree();
    if degree > 1 {
        return Err(AppError::UnsupportedDegree(degree));
    }
    let lie = lie_operator(mesh, x_flat, degree)?;
    let mut state = alpha0.clone();
    let mut snapshots = Vec::new();
    for iteration in 1..=config.iterations {
        let rate = lie.apply(&state)?;
        state = state.add_scaled(&rate, -config.time_step)?;
        if state.max_abs() > BLOWUP_THRESHOLD {
            snapshots.push((iteration, state));
            return Ok(AdvectionRun {
                snapshots,
                outcome: AdvectionOutcome::Blowup { at_iteration: iteration },
            });
        }
        let record = (config.snapshot_every != 0 && iteration % config.snapshot_every == 0)
            || iteration == config.iterations;
        if record {
            snapshots.push((iteration, state.clone()));
        }
    }
    if config.iterations == 0 {
        snapshots.push((0, state));
    }
    Ok(AdvectionRun {
        snapshots,
        outcome: AdvectionOutcome::Completed,
    })
}
