use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::{ExperimentConfig, HarnessError};

/// Largest accepted fraction of replicas aborted by truncation.
pub const ABORT_THRESHOLD: f64 = 1e-3;

/// One compared point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub group: String,
    pub x: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub predicted: f64,
    pub predicted_stderr: f64,
    pub z: Option<f64>,
}

impl ReportRow {
    pub fn new(group: impl Into<String>, x: f64, estimate: f64, stderr: f64, predicted: f64) -> Self {
        Self {
            group: group.into(),
            x,
            estimate,
            stderr,
            ci_lo: estimate - crate::dynamics::Z95 * stderr,
            ci_hi: estimate + crate::dynamics::Z95 * stderr,
            predicted,
            predicted_stderr: 0.0,
            z: None,
        }
    }

    pub fn with_interval(mut self, lo: f64, hi: f64) -> Self {
        self.ci_lo = lo;
        self.ci_hi = hi;
        self
    }

    pub fn with_z(mut self, predicted_stderr: f64, z: f64) -> Self {
        self.predicted_stderr = predicted_stderr;
        self.z = Some(z);
        self
    }
}

/// Named pass/fail criterion. Checks with `required == false` are reported
/// but do not affect the overall flag.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    pub required: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
            required: true,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value >= threshold,
            required: true,
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            value: f64::from(u8::from(pass)),
            threshold: 1.0,
            pass,
            required: true,
        }
    }

    pub fn informative(mut self) -> Self {
        self.required = false;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ReportSummary {
    pub max_abs_z: Option<f64>,
    pub sup_distance: Option<f64>,
    pub abort_fraction: f64,
    pub replicas: u64,
    pub truncation_aborts: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub experiment: String,
    #[serde(skip_serializing)]
    pub rows: Vec<ReportRow>,
    pub summary: ReportSummary,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub metadata: BTreeMap<String, serde_json::Value>,
    pub config: Option<ExperimentConfig>,
}

impl ComparisonReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            rows: Vec::new(),
            summary: ReportSummary::default(),
            checks: Vec::new(),
            pass: false,
            metadata: BTreeMap::new(),
            config: None,
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Serialize) {
        self.metadata
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    pub fn note_replicas(&mut self, replicas: u64, aborts: u64) {
        self.summary.replicas += replicas;
        self.summary.truncation_aborts += aborts;
        let attempted = self.summary.replicas + self.summary.truncation_aborts;
        self.summary.abort_fraction = if attempted == 0 {
            0.0
        } else {
            self.summary.truncation_aborts as f64 / attempted as f64
        };
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Fills the summary extremes from the rows and sets the pass flag.
    pub fn finish(mut self) -> Self {
        let zs = self.rows.iter().filter_map(|r| r.z).map(f64::abs);
        self.summary.max_abs_z = zs.fold(None, |m: Option<f64>, z| Some(m.map_or(z, |m| m.max(z))));
        self.checks.push(Check::at_most(
            "truncation_abort_fraction",
            self.summary.abort_fraction,
            ABORT_THRESHOLD,
        ));
        self.pass = self.checks.iter().all(|c| c.pass || !c.required);
        self
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), HarnessError> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<(), HarnessError> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
