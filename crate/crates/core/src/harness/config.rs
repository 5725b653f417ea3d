use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::measures::{ExplicitTable, MarginalFamily, MeasureError, ViolationFamily};
use crate::model::{ModelDocument, ModelSpec, Occupancy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Identity,
    LimitAsym,
    LimitSym,
    Background,
    Collision,
    MeasureAudit,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Identity,
        ExperimentKind::LimitAsym,
        ExperimentKind::LimitSym,
        ExperimentKind::Background,
        ExperimentKind::Collision,
        ExperimentKind::MeasureAudit,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Identity => "identity",
            ExperimentKind::LimitAsym => "limit_asym",
            ExperimentKind::LimitSym => "limit_sym",
            ExperimentKind::Background => "background",
            ExperimentKind::Collision => "collision",
            ExperimentKind::MeasureAudit => "measure_audit",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment `{s}`")))
    }
}

/// Marginal family used for the initial product measures.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyChoice {
    /// The model's product stationary family.
    #[default]
    Stationary,
    Bernoulli,
    Geometric { cap: Occupancy },
    Poisson { cap: Occupancy },
    DiscreteGaussian { beta: f64, half_width: Occupancy },
    Explicit { table: ExplicitTable },
}

impl FamilyChoice {
    pub fn build(&self, model: &ModelSpec) -> Result<MarginalFamily, MeasureError> {
        match self {
            FamilyChoice::Stationary => MarginalFamily::from_model(model),
            FamilyChoice::Bernoulli => Ok(MarginalFamily::bernoulli()),
            FamilyChoice::Geometric { cap } => MarginalFamily::geometric(*cap),
            FamilyChoice::Poisson { cap } => MarginalFamily::poisson(*cap),
            FamilyChoice::DiscreteGaussian { beta, half_width } => MarginalFamily::discrete_gaussian(*beta, *half_width),
            FamilyChoice::Explicit { table } => MarginalFamily::explicit(table.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationCase {
    pub family: ViolationFamily,
    pub rho: f64,
    pub lambda: f64,
    #[serde(default = "default_violation_cap")]
    pub cap: Occupancy,
}

fn default_violation_cap() -> Occupancy {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianShift {
    pub beta: f64,
    pub densities: Vec<f64>,
    #[serde(default = "default_gaussian_half_width")]
    pub half_width: Occupancy,
}

fn default_gaussian_half_width() -> Occupancy {
    25
}

/// Grids scanned by the measure audit.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AuditGrid {
    /// Densities for marginal reconstruction of the configured family.
    pub densities: Vec<f64>,
    /// `(rho, lambda)` pairs for dominance and coupling checks.
    pub pairs: Vec<[f64; 2]>,
    /// Pairs expected to admit the probability coupling.
    pub coupling_expected: Vec<[f64; 2]>,
    pub violations: Vec<ViolationCase>,
    pub gaussian: Option<GaussianShift>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedValue {
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

fn default_replicas() -> u64 {
    10_000
}

fn default_z() -> f64 {
    3.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub model: ModelDocument,
    #[serde(default)]
    pub family: FamilyChoice,
    #[serde(default)]
    pub rho: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub t_grid: Vec<f64>,
    /// Scaling parameters for the limit experiments.
    #[serde(default)]
    pub n_grid: Vec<u32>,
    #[serde(default = "default_replicas")]
    pub replicas: u64,
    /// Replicas for the single-process side; defaults to `replicas`.
    #[serde(default)]
    pub single_replicas: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    /// Half width of the simulation window; derived from the rates when absent.
    #[serde(default)]
    pub window: Option<i32>,
    /// Inclusive range of `n` for the identity rows.
    #[serde(default)]
    pub n_range: Option<[i32; 2]>,
    /// Highest occupancy level tested by the background experiment.
    #[serde(default)]
    pub max_level: Option<Occupancy>,
    #[serde(default = "default_z")]
    pub z_threshold: f64,
    /// Sup-distance threshold; defaults to the DKW bound plus the finite-size allowance.
    #[serde(default)]
    pub sup_threshold: Option<f64>,
    #[serde(default)]
    pub atom_threshold: Option<f64>,
    /// Half width, in the scaled variable, of the region skipped around fan edges.
    #[serde(default)]
    pub edge_exclusion: Option<f64>,
    #[serde(default)]
    pub expected: Option<ExpectedValue>,
    #[serde(default)]
    pub audit: AuditGrid,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, model: ModelDocument) -> Self {
        Self {
            experiment,
            model,
            family: FamilyChoice::Stationary,
            rho: 0.0,
            lambda: 0.0,
            t: None,
            t_grid: Vec::new(),
            n_grid: Vec::new(),
            replicas: default_replicas(),
            single_replicas: None,
            seed: 0,
            window: None,
            n_range: None,
            max_level: None,
            z_threshold: default_z(),
            sup_threshold: None,
            atom_threshold: None,
            edge_exclusion: None,
            expected: None,
            audit: AuditGrid::default(),
            output: OutputPaths::default(),
        }
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// `t`, or the last entry of `t_grid`.
    pub fn time(&self) -> Result<f64, HarnessError> {
        self.t
            .or_else(|| self.t_grid.last().copied())
            .ok_or_else(|| HarnessError::Config(format!("{} needs `t`", self.experiment)))
    }

    /// `t_grid`, or `[t]`.
    pub fn times(&self) -> Result<Vec<f64>, HarnessError> {
        if self.t_grid.is_empty() {
            Ok(vec![self.time()?])
        } else {
            Ok(self.t_grid.clone())
        }
    }

    pub fn single_replicas(&self) -> u64 {
        self.single_replicas.unwrap_or(self.replicas)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.experiment == ExperimentKind::MeasureAudit {
            return Ok(());
        }
        if self.replicas < 2 {
            return bad(format!("need at least 2 replicas, got {}", self.replicas));
        }
        for t in self.t.iter().chain(&self.t_grid) {
            if !(t.is_finite() && *t >= 0.0) {
                return bad(format!("invalid time {t}"));
            }
        }
        if self.experiment != ExperimentKind::Collision {
            if self.lambda > self.rho {
                return bad("lambda > rho (negative discrepancy) is not implemented".into());
            }
            if !(self.rho > self.lambda) {
                return bad(format!("need rho > lambda, got rho = {}, lambda = {}", self.rho, self.lambda));
            }
        }
        if let Some(w) = self.window {
            if w < 1 {
                return bad(format!("window half width must be positive, got {w}"));
            }
        }
        match self.experiment {
            ExperimentKind::LimitAsym | ExperimentKind::LimitSym => {
                self.time()?;
                if self.n_grid.is_empty() || self.n_grid.contains(&0) {
                    return bad("limit experiments need a positive `n_grid`".into());
                }
            }
            ExperimentKind::Identity | ExperimentKind::Collision | ExperimentKind::Background => {
                self.time()?;
            }
            ExperimentKind::MeasureAudit => {}
        }
        if let Some([a, b]) = self.n_range {
            if a > b {
                return bad(format!("empty n_range [{a}, {b}]"));
            }
        }
        Ok(())
    }
}
