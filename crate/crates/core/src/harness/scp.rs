use std::path::Path;

use serde::Serialize;

use super::setup::{simulate_coupled, Setup};
use super::HarnessError;
use crate::dynamics::{wilson, WindowPlan, Z95};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScpRow {
    pub n: i32,
    pub count: u64,
    pub phat: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

/// Histogram of the second class particle position at one time.
#[derive(Clone, Debug, Serialize)]
pub struct ScpHistogram {
    #[serde(skip_serializing)]
    pub rows: Vec<ScpRow>,
    pub window: WindowPlan,
    pub replicas: u64,
    pub truncation_aborts: u64,
    pub r_max: f64,
    pub events: u64,
    pub seed: u64,
}

impl ScpHistogram {
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

/// Runs `replicas` coupled systems to time `t` and tabulates `Q(t)`.
pub fn simulate_scp(
    setup: &Setup,
    t: f64,
    replicas: u64,
    window: Option<i32>,
    seed: u64,
) -> Result<ScpHistogram, HarnessError> {
    let plan = setup.window(t, window);
    let run = simulate_coupled(setup, &plan, replicas, seed, "simulate/scp")?;
    let k = run.outcomes.len() as u64;
    let mut rows = Vec::new();
    if k > 0 {
        let lo = run.outcomes.iter().map(|o| o.q).min().unwrap_or(0);
        let hi = run.outcomes.iter().map(|o| o.q).max().unwrap_or(0);
        let mut counts = vec![0u64; (hi - lo + 1) as usize];
        for o in &run.outcomes {
            counts[(o.q - lo) as usize] += 1;
        }
        for (i, &count) in counts.iter().enumerate() {
            let (wl, wh) = wilson(count, k, Z95);
            rows.push(ScpRow {
                n: lo + i as i32,
                count,
                phat: count as f64 / k as f64,
                wilson_lo: wl,
                wilson_hi: wh,
            });
        }
    }
    Ok(ScpHistogram {
        rows,
        window: plan,
        replicas: k,
        truncation_aborts: run.aborts,
        r_max: setup.r_max,
        events: run.events,
        seed,
    })
}
