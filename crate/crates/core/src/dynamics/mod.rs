//! Exact continuous-time simulation of single and coupled systems on a finite window.

mod collision;
mod config;
mod engine;
mod estimate;
mod rng;
mod sampling;
mod sumtree;
mod window;

use thiserror::Error;

pub use collision::{collision_initial, run_collision, CollisionSample};
pub use config::{Configuration, CoupledState, Discrepancy};
pub use engine::{Dynamics, EvolveStats};
pub use estimate::{normal_cdf, wilson, z_score, Estimate, IntervalKind, Z95};
pub use rng::{experiment_id, replica_rng, run_replicas};
pub use sampling::StepSampler;
pub use sumtree::SumTree;
pub use window::{
    ballistic_window, bulk_interval, bulk_rate, diffusive_window, poisson_tail, Scaling, WindowPlan, BULK_QUANTILE,
    WINDOW_MARGIN,
};

use crate::model::Occupancy;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("occupancy left the simulation support next to site {site} at time {time}")]
    Truncation { site: i32, time: f64 },
    #[error("site {site} has occupancy {occupancy} outside the simulation support")]
    OutOfSupport { site: i32, occupancy: Occupancy },
    #[error("kernel is not attractive; coupled evolution refused")]
    NotAttractive,
    #[error("coupled order broken at site {site}, time {time}")]
    OrderViolated { site: i32, time: f64 },
    #[error("expected a lone second class particle, found total {total} on {sites} sites")]
    NotSingleDiscrepancy { total: u64, sites: usize },
    #[error("cannot evolve backwards from {now} to {t_end}")]
    TimeReversed { now: f64, t_end: f64 },
    #[error("model needs finite occupancy bounds")]
    UnboundedOccupancy,
}
