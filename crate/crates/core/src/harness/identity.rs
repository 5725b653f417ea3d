use super::setup::{simulate_coupled, simulate_single, Setup};
use super::{Check, ComparisonReport, ExperimentConfig, HarnessError, ReportRow};
use crate::dynamics::{wilson, z_score, WINDOW_MARGIN, Z95};

/// `P(Q(t) <= n)` from coupled replicas against `(rho - E omega_{n+1}(t)) / (rho - lambda)`
/// from independent single-system replicas.
pub fn run_identity(cfg: &ExperimentConfig) -> Result<ComparisonReport, HarnessError> {
    let setup = Setup::from_config(cfg)?;
    let t = cfg.time()?;
    let [lo, hi] = cfg.n_range.unwrap_or([-10, 10]);
    let mut plan = setup.window(t, cfg.window);
    if cfg.window.is_none() {
        plan.half_width = plan.half_width.max(lo.abs().max(hi.abs() + 1) + WINDOW_MARGIN);
    }
    if lo.abs() > plan.half_width || hi + 1 > plan.half_width {
        return Err(HarnessError::Config(format!(
            "n_range [{lo}, {hi}] does not fit in half width {}",
            plan.half_width
        )));
    }

    let coupled = simulate_coupled(&setup, &plan, cfg.replicas, cfg.seed, "identity/coupled")?;
    let single = simulate_single(&setup, &plan, cfg.single_replicas(), cfg.seed, "identity/single", |c| {
        (lo..=hi).map(|n| f64::from(c.at(n + 1))).collect()
    })?;

    let mut qs: Vec<i32> = coupled.outcomes.iter().map(|o| o.q).collect();
    qs.sort_unstable();
    let k = qs.len() as u64;
    if k < 2 {
        return Err(HarnessError::Config("fewer than two coupled replicas survived truncation".into()));
    }
    let span = cfg.rho - cfg.lambda;
    let mut report = ComparisonReport::new("identity");
    for (i, n) in (lo..=hi).enumerate() {
        let hits = qs.partition_point(|&q| q <= n) as u64;
        let p = hits as f64 / k as f64;
        let se = (p * (1.0 - p) / k as f64).sqrt();
        let (wlo, whi) = wilson(hits, k, Z95);
        let rhs = (cfg.rho - single.mean[i]) / span;
        let rhs_se = single.stderr[i] / span;
        let z = z_score(p, se, rhs, rhs_se);
        report.rows.push(
            ReportRow::new("identity", f64::from(n), p, se, rhs)
                .with_interval(wlo, whi)
                .with_z(rhs_se, z),
        );
    }
    report.note_replicas(k, coupled.aborts);
    report.note_replicas(single.replicas, single.aborts);
    let max_z = report.rows.iter().filter_map(|r| r.z).map(f64::abs).fold(0.0, f64::max);
    report.checks.push(Check::at_most("max_abs_z", max_z, cfg.z_threshold));
    report.meta("t", t);
    report.meta("window", plan);
    report.meta("coupled_replicas", k);
    report.meta("single_replicas", single.replicas);
    report.meta("events", coupled.events);
    Ok(report.finish())
}
