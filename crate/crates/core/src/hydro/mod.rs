//! Hydrodynamic flux and diffusivity, Riemann and parabolic similarity
//! profiles, and the limiting laws of the second class particle.

mod closed_form;
mod flux;
mod godunov;
mod parabolic;
mod riemann;

use thiserror::Error;

pub use closed_form::{closed_form_sym_zr, SymZrClosedForm};
pub use flux::{diffusivity_d, flux_g, is_stationary_family, FluxTable, Provenance, FLUX_GRID_POINTS};
pub use godunov::{godunov_oracle, GodunovRun};
pub use parabolic::{parabolic_solve, ParabolicSolution, PARABOLIC_FACTOR};
pub use riemann::{riemann_solve, scp_limit_cdf, Atom, LimitCdf, ProfileKind, Shock, SimilarityProfile};

use crate::measures::MeasureError;
use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum HydroError {
    #[error("densities out of order: rho = {rho}, lambda = {lambda}")]
    DensityOrder { rho: f64, lambda: f64 },
    #[error("density {value} outside the table range [{lo}, {hi}]")]
    OutsideTable { value: f64, lo: f64, hi: f64 },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("grid not strictly increasing at index {0}")]
    GridNotIncreasing(usize),
    #[error("non-finite table value at density {0}")]
    NonFinite(f64),
    #[error("marginal at density {0} charges occupancies outside the model range")]
    OutsideModelRange(f64),
    #[error("diffusivity decreases between {u0} and {u1}")]
    NonMonotoneDiffusivity { u0: f64, u1: f64 },
    #[error("time step {dt} exceeds the stability bound {limit}")]
    StepTooLarge { dt: f64, limit: f64 },
    #[error("step-halving changed the solution by {0}")]
    Unstable(f64),
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
