use rand_chacha::ChaCha8Rng;

use super::{Check, ComparisonReport, ExperimentConfig, HarnessError, ReportRow};
use crate::dynamics::{ballistic_window, experiment_id, run_collision, run_replicas, wilson, Dynamics, DynamicsError, Z95};
use crate::hydro::{riemann_solve, FluxTable};
use crate::measures::MarginalFamily;
use crate::model::ModelSpec;

/// Sample times of the drift series when the config gives a single time.
const SERIES_POINTS: usize = 25;

/// `G(u(0))` at the origin of the Riemann solution from the maximal step, when
/// the model has a product stationary family.
fn hydro_bond_flux(model: &ModelSpec, omin: f64, omax: f64) -> Result<f64, HarnessError> {
    let family = MarginalFamily::from_model(model)?;
    let flux = FluxTable::flux(model, &family, omin, omax)?;
    let profile = riemann_solve(&flux, omax, omin)?;
    Ok(flux.eval(profile.u(0.0)))
}

/// Survival of two opposite discrepancies started at bond `(0, 1)` of the
/// maximal step, against the lower bound `C0 = G_bar(1) / p(omax, omin)`.
pub fn run_collision_experiment(cfg: &ExperimentConfig) -> Result<ComparisonReport, HarnessError> {
    let model = cfg.model.build()?;
    let r = *model.range();
    let (omin, omax) = match (r.omin, r.omax) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(HarnessError::Config(format!("{} has unbounded occupancies", model.name))),
    };
    let t_end = cfg.time()?;
    let times: Vec<f64> = if cfg.t_grid.len() > 1 {
        cfg.t_grid.clone()
    } else {
        (1..=SERIES_POINTS).map(|i| t_end * i as f64 / SERIES_POINTS as f64).collect()
    };
    let dynamics = Dynamics::for_model(&model);
    let mut plan = ballistic_window(model.kernel.max_bond_rate(), t_end);
    if let Some(w) = cfg.window {
        plan.half_width = w;
    }
    let results = run_replicas(cfg.replicas, cfg.seed, experiment_id("collision"), |_, rng: &mut ChaCha8Rng| {
        match run_collision(&model, &dynamics, plan.half_width, &times, rng) {
            Ok(s) => Ok(Some(s)),
            Err(DynamicsError::Truncation { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let mut survived = 0u64;
    let mut aborts = 0u64;
    let mut n = 0u64;
    let mut sum = vec![0.0; times.len()];
    let mut sumsq = vec![0.0; times.len()];
    let mut alive = vec![0u64; times.len()];
    for r in results {
        match r? {
            Some(s) => {
                n += 1;
                survived += u64::from(s.survived);
                for (i, d) in s.drift_series.iter().enumerate() {
                    sum[i] += d;
                    sumsq[i] += d * d;
                }
                for (a, &on) in alive.iter_mut().zip(&s.alive_series) {
                    *a += u64::from(on);
                }
            }
            None => aborts += 1,
        }
    }
    if n < 2 {
        return Err(HarnessError::Config("fewer than two collision replicas survived truncation".into()));
    }
    let nf = n as f64;
    let p_jump = model.kernel.p(omax, omin);
    let hydro = if model.misanthrope.is_some() {
        hydro_bond_flux(&model, f64::from(omin), f64::from(omax)).ok()
    } else {
        None
    };

    let mut report = ComparisonReport::new("collision");
    report.note_replicas(n, aborts);
    let mut series = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let mean = sum[i] / nf;
        let se = ((sumsq[i] / nf - mean * mean).max(0.0) / (nf - 1.0)).sqrt();
        series.push(mean);
        report.rows.push(ReportRow::new("drift", t, mean, se, hydro.unwrap_or(f64::NAN)));
    }
    for (&t, &a) in times.iter().zip(&alive) {
        let p = a as f64 / nf;
        let (lo, hi) = wilson(a, n, Z95);
        let target = cfg.expected.as_ref().map_or(f64::NAN, |e| e.value);
        report
            .rows
            .push(ReportRow::new("survival_curve", t, p, (p * (1.0 - p) / nf).sqrt(), target).with_interval(lo, hi));
    }
    let g_series = series[series.len() - 1];
    let c0_series = g_series / p_jump;
    let c0_hydro = hydro.map(|g| g / p_jump);
    let c0 = c0_hydro.unwrap_or(c0_series);

    let p = survived as f64 / nf;
    let se = (p * (1.0 - p) / nf).sqrt();
    let (lo, hi) = wilson(survived, n, Z95);
    let target = cfg.expected.as_ref().map_or(c0, |e| e.value);
    report
        .rows
        .push(ReportRow::new("survival", t_end, p, se, target).with_interval(lo, hi));
    report.checks.push(Check::at_least("survival_plus_3se_vs_c0", p + 3.0 * se, c0));
    if c0_hydro.is_some() {
        report
            .checks
            .push(Check::at_least("survival_plus_3se_vs_c0_series", p + 3.0 * se, c0_series).informative());
    }
    if let Some(e) = &cfg.expected {
        report
            .checks
            .push(Check::at_most("survival_error", (p - e.value).abs(), e.tolerance));
    }
    report.summary.sup_distance = None;
    report.meta("t_end", t_end);
    report.meta("window", plan);
    report.meta("survival", p);
    report.meta("survival_wilson", [lo, hi]);
    report.meta("p_omax_omin", p_jump);
    report.meta("g_bar_series", g_series);
    report.meta("g_bar_hydro", hydro);
    report.meta("c0", c0);
    report.meta("c0_series", c0_series);
    report.meta("c0_hydro", c0_hydro);
    Ok(report.finish())
}
