//! Shared fixtures for the benchmarks.

use std::collections::BTreeMap;

use scpkit::dynamics::{Dynamics, StepSampler};
use scpkit::hydro::FluxTable;
use scpkit::measures::MarginalFamily;
use scpkit::model::{build_model, ModelName, ModelSpec};

pub fn model(name: ModelName, kv: &[(&str, f64)]) -> ModelSpec {
    let params: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    build_model(name, &params).expect("zoo model")
}

/// Model, dynamics and step sampler at `(rho, lambda)`.
pub struct StepFixture {
    pub model: ModelSpec,
    pub dynamics: Dynamics,
    pub sampler: StepSampler,
}

impl StepFixture {
    pub fn new(name: ModelName, kv: &[(&str, f64)], rho: f64, lambda: f64) -> Self {
        let model = model(name, kv);
        let family = MarginalFamily::from_model(&model).expect("stationary family");
        let sampler = StepSampler::new(&family, rho, lambda).expect("step sampler");
        Self {
            dynamics: Dynamics::for_model(&model),
            model,
            sampler,
        }
    }
}

/// Flux of a zoo model tabulated between `lo` and `hi`.
pub fn flux(name: ModelName, kv: &[(&str, f64)], lo: f64, hi: f64) -> FluxTable {
    let m = model(name, kv);
    let family = MarginalFamily::from_model(&m).expect("stationary family");
    FluxTable::flux(&m, &family, lo, hi).expect("flux table")
}
