//! Experiment drivers that compare simulated second class particles with
//! the exact identities and hydrodynamic limit laws.

mod audit;
mod background;
mod collision;
mod config;
mod identity;
mod limits;
mod report;
mod scp;
mod setup;

use thiserror::Error;

pub use audit::run_measure_audit;
pub use background::run_background;
pub use collision::run_collision_experiment;
pub use config::{
    AuditGrid, ExpectedValue, ExperimentConfig, ExperimentKind, FamilyChoice, GaussianShift, OutputPaths,
    ViolationCase,
};
pub use identity::run_identity;
pub use limits::{run_limit_asym, run_limit_sym, skellam_cdf};
pub use report::{Check, ComparisonReport, ReportRow, ReportSummary, ABORT_THRESHOLD};
pub use scp::{simulate_scp, ScpHistogram, ScpRow};
pub use setup::{
    dkw_bound, empirical_cdf, plan_window, simulate_coupled, simulate_single, CoupledOutcome, CoupledRun, MeanVec,
    Setup, FINITE_N_ALLOWANCE, SYMMETRIC_TIME_FACTOR,
};

use crate::dynamics::DynamicsError;
use crate::hydro::HydroError;
use crate::measures::MeasureError;
use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Hydro(#[from] HydroError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Validates `cfg`, runs the experiment it names and attaches the config to the report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ComparisonReport, HarnessError> {
    cfg.validate()?;
    let mut report = match cfg.experiment {
        ExperimentKind::Identity => run_identity(cfg)?,
        ExperimentKind::LimitAsym => run_limit_asym(cfg)?,
        ExperimentKind::LimitSym => run_limit_sym(cfg)?,
        ExperimentKind::Background => run_background(cfg)?,
        ExperimentKind::Collision => run_collision_experiment(cfg)?,
        ExperimentKind::MeasureAudit => run_measure_audit(cfg)?,
    };
    report.config = Some(cfg.clone());
    Ok(report)
}
