//! One-site marginal families and the coupling measures built from them.

mod family;
mod pair;

use thiserror::Error;

pub use family::{ExplicitTable, FamilyMode, MarginalFamily, Pmf, TAIL_THRESHOLD};
pub use pair::{
    bar_nu, coupling_exists, diagonal, find_violation_everywhere, hat_nu, hat_nu_prime, CouplingVerdict, PairKind,
    PairMarginal, PairWeight, ViolationFamily, COUPLING_TOL,
};

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("density {rho} outside the attainable interval [{lo}, {hi}]")]
    DensityOutOfDomain { rho: f64, lo: f64, hi: f64 },
    #[error("density {rho} discards tail mass {tail:e} beyond the truncation")]
    TailTooHeavy { rho: f64, tail: f64 },
    #[error("densities out of order: rho = {rho}, lambda = {lambda}")]
    DensityOrder { rho: f64, lambda: f64 },
    #[error("no table at density {0}")]
    DensityNotTabulated(f64),
    #[error("no violation witness up to {cap} for rho = {rho}, lambda = {lambda}")]
    NoWitness { rho: f64, lambda: f64, cap: i32 },
    #[error("zero variance at density {0}")]
    ZeroVariance(f64),
    #[error("model {0} has no product stationary family")]
    NoStationaryFamily(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
