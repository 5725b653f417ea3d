use rand::Rng;
use serde::Serialize;

use super::config::{Configuration, CoupledState};
use super::engine::Dynamics;
use super::DynamicsError;
use crate::model::ModelSpec;

/// Outcome of one two-discrepancy run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollisionSample {
    pub survived: bool,
    /// `p - q` of the lower system at bond `(0, 1)`, one value per sample time.
    pub drift_series: Vec<f64>,
    /// Both discrepancies still present, one value per sample time.
    pub alive_series: Vec<bool>,
}

/// Lower system: maximal step; upper: one particle moved from site 0 to site 1.
pub fn collision_initial(model: &ModelSpec, half_width: i32) -> Result<CoupledState, DynamicsError> {
    let r = model.range();
    let (omin, omax) = match (r.omin, r.omax) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(DynamicsError::UnboundedOccupancy),
    };
    let lower = Configuration::from_fn(half_width, |i| if i <= 0 { omax } else { omin });
    let upper = Configuration::from_fn(half_width, |i| match i {
        0 => omax - 1,
        1 => omin + 1,
        _ if i <= 0 => omax,
        _ => omin,
    });
    Ok(CoupledState::new(upper, lower))
}

/// Evolves the collision configuration to the last of `sample_times` (sorted).
pub fn run_collision<R: Rng + ?Sized>(
    model: &ModelSpec,
    dynamics: &Dynamics,
    half_width: i32,
    sample_times: &[f64],
    rng: &mut R,
) -> Result<CollisionSample, DynamicsError> {
    let mut state = collision_initial(model, half_width)?;
    let k = &model.kernel;
    let mut drift_series = Vec::with_capacity(sample_times.len());
    let mut alive_series = Vec::with_capacity(sample_times.len());
    for &t in sample_times {
        dynamics.evolve_coupled(&mut state, t, rng, false)?;
        let (a, b) = (state.lower().at(0), state.lower().at(1));
        drift_series.push(k.p(a, b) - k.q(a, b));
        alive_series.push(state.discrepancy_total() == 2);
    }
    Ok(CollisionSample {
        survived: state.discrepancy_total() == 2,
        drift_series,
        alive_series,
    })
}
