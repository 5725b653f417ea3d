//! Rate kernels, the built-in model zoo and structural validators.

mod checks;
mod kernel;
mod zoo;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checks::{
    check_attractiveness, check_gradient, check_misanthrope, AttractivenessVerdict, GradientVerdict,
    MisanthropeVerdict, Monotonicity, RateSide,
};
pub use kernel::{Occupancy, OccupancyRange, RateFn, RateKernel, RateTable};
pub use zoo::{
    build_model, build_model_with, GradientFunction, MisanthropeTriple, ModelName, ModelSpec, PairFn, SiteFn,
    Truncation, BRICKLAYERS_DEFAULT_HALF_WIDTH, ZERO_RANGE_DEFAULT_CAP,
};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model {model} requires parameter `{key}`")]
    MissingParameter { model: ModelName, key: &'static str },
    #[error("model {model} does not take parameter `{key}`")]
    UnknownParameter { model: ModelName, key: String },
    #[error("model {model}: parameter {key} = {value} is invalid ({reason})")]
    ParameterOutOfRange {
        model: ModelName,
        key: String,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid occupancy range: {0}")]
    InvalidRange(String),
    #[error("invalid rate at ({a},{b}): p = {p}, q = {q}")]
    InvalidRate { a: Occupancy, b: Occupancy, p: f64, q: f64 },
    #[error("degenerate kernel: {0}")]
    Degenerate(String),
    #[error("model is not symmetric")]
    NotSymmetric,
    #[error("model has no gradient function")]
    NoGradientFunction,
    #[error("model file: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
}

/// On-disk model definition: `{name, parameters, truncation}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub name: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub truncation: Option<Truncation>,
}

impl ModelDocument {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn build(&self) -> Result<ModelSpec, ModelError> {
        let name: ModelName = self.name.parse()?;
        build_model_with(name, &self.parameters, self.truncation)
    }
}

impl ModelSpec {
    pub fn to_document(&self) -> ModelDocument {
        let r = self.range();
        let truncation = if r.is_bounded() {
            None
        } else {
            Some(Truncation {
                floor: r.sim_floor,
                cap: r.sim_cap,
            })
        };
        ModelDocument {
            name: self.name.to_string(),
            parameters: self.parameters.clone(),
            truncation,
        }
    }
}
