use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::setup::{simulate_coupled, simulate_single, Setup};
use super::{Check, ComparisonReport, ExperimentConfig, HarnessError, ReportRow};
use crate::dynamics::{wilson, z_score, Z95};
use crate::hydro::is_stationary_family;
use crate::model::Occupancy;

const CHI2_LEVEL: f64 = 0.05;
/// Smallest expected count per merged bin.
const MIN_EXPECTED: f64 = 5.0;

/// Merges adjacent bins left to right until every bin of every row has
/// expected count at least `MIN_EXPECTED`; returns `(observed, expected)` per row.
fn merge_bins(observed: &[Vec<f64>], expected: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let rows = observed.len();
    let (mut obs, mut exp) = (vec![Vec::new(); rows], vec![Vec::new(); rows]);
    let (mut acc_o, mut acc_e) = (vec![0.0; rows], vec![0.0; rows]);
    for b in 0..observed[0].len() {
        for r in 0..rows {
            acc_o[r] += observed[r][b];
            acc_e[r] += expected[r][b];
        }
        if acc_e.iter().all(|&e| e >= MIN_EXPECTED) {
            for r in 0..rows {
                obs[r].push(acc_o[r]);
                exp[r].push(acc_e[r]);
                acc_o[r] = 0.0;
                acc_e[r] = 0.0;
            }
        }
    }
    if acc_e.iter().any(|&e| e > 0.0) || acc_o.iter().any(|&o| o > 0.0) {
        for r in 0..rows {
            match (obs[r].last_mut(), exp[r].last_mut()) {
                (Some(o), Some(e)) => {
                    *o += acc_o[r];
                    *e += acc_e[r];
                }
                _ => {
                    obs[r].push(acc_o[r]);
                    exp[r].push(acc_e[r]);
                }
            }
        }
    }
    (obs, exp)
}

/// Pearson statistic and upper tail probability with `bins - 1 - lost` degrees of freedom.
fn chi_square(obs: &[Vec<f64>], exp: &[Vec<f64>], lost: usize) -> (f64, usize, f64) {
    let stat: f64 = obs
        .iter()
        .flatten()
        .zip(exp.iter().flatten())
        .filter(|(_, &e)| e > 0.0)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let bins = obs[0].len();
    let df = bins.saturating_sub(1 + lost);
    if df == 0 {
        return (stat, 0, 1.0);
    }
    let p = 1.0 - ChiSquared::new(df as f64).expect("positive df").cdf(stat);
    (stat, df, p)
}

/// Two-sample homogeneity test on count vectors over a common support.
pub(crate) fn homogeneity(a: &[f64], b: &[f64]) -> (f64, usize, f64) {
    let (na, nb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    let total = na + nb;
    let ea: Vec<f64> = a.iter().zip(b).map(|(x, y)| na * (x + y) / total).collect();
    let eb: Vec<f64> = a.iter().zip(b).map(|(x, y)| nb * (x + y) / total).collect();
    let (obs, exp) = merge_bins(&[a.to_vec(), b.to_vec()], &[ea, eb]);
    chi_square(&obs, &exp, 0)
}

/// Goodness of fit of counts against probabilities.
pub(crate) fn goodness_of_fit(counts: &[f64], probs: &[f64]) -> (f64, usize, f64) {
    let n: f64 = counts.iter().sum();
    let exp: Vec<f64> = probs.iter().map(|p| n * p).collect();
    let (obs, exp) = merge_bins(&[counts.to_vec()], &[exp]);
    chi_square(&obs, &exp, 0)
}

fn label_time(t: f64) -> String {
    format!("{t}")
}

/// Law of the site seen by the second class particle, `omega_hat_{Q(t)}(t)`,
/// against the difference of two homogeneous runs, and its constancy in time.
pub fn run_background(cfg: &ExperimentConfig) -> Result<ComparisonReport, HarnessError> {
    let setup = Setup::from_config(cfg)?;
    let (rho, lambda) = (cfg.rho, cfg.lambda);
    let span = rho - lambda;
    let times = cfg.times()?;
    let stationary = is_stationary_family(&setup.model, &setup.family);
    let high = setup.at(rho, rho)?;
    let low = setup.at(lambda, lambda)?;

    let mut report = ComparisonReport::new("background");
    let mut samples: Vec<Vec<Occupancy>> = Vec::with_capacity(times.len());
    for &t in &times {
        let plan = setup.window(t, cfg.window);
        let run = simulate_coupled(&setup, &plan, cfg.replicas, cfg.seed, &format!("background/coupled/t{}", label_time(t)))?;
        report.note_replicas(run.outcomes.len() as u64, run.aborts);
        samples.push(run.outcomes.iter().map(|o| o.upper_at_q).collect());
    }
    let seen_lo = samples.iter().flatten().copied().min().unwrap_or(0);
    let seen_hi = samples.iter().flatten().copied().max().unwrap_or(0);
    let level_lo = setup.model.range().omin.map_or(seen_lo, |m| m + 1).min(seen_lo);
    let level_hi = cfg.max_level.unwrap_or(seen_hi).max(level_lo);
    let levels: Vec<Occupancy> = (level_lo..=level_hi).collect();

    let mut max_z: f64 = 0.0;
    let mut max_exact_z: f64 = 0.0;
    for (i, &t) in times.iter().enumerate() {
        let tag = label_time(t);
        let observe = |c: &crate::dynamics::Configuration| -> Vec<f64> {
            let w = c.at(0);
            levels.iter().map(|&k| f64::from(u8::from(w >= k))).collect()
        };
        let hi_plan = high.window(t, cfg.window);
        let lo_plan = low.window(t, cfg.window);
        let reps = cfg.single_replicas();
        let hi_run = simulate_single(&high, &hi_plan, reps, cfg.seed, &format!("background/high/t{tag}"), observe)?;
        let lo_run = simulate_single(&low, &lo_plan, reps, cfg.seed, &format!("background/low/t{tag}"), observe)?;
        report.note_replicas(hi_run.replicas, hi_run.aborts);
        report.note_replicas(lo_run.replicas, lo_run.aborts);

        let sample = &samples[i];
        let k = sample.len() as u64;
        for (j, &level) in levels.iter().enumerate() {
            let hits = sample.iter().filter(|&&w| w == level).count() as u64;
            let p = hits as f64 / k as f64;
            let se = (p * (1.0 - p) / k as f64).sqrt();
            let (wlo, whi) = wilson(hits, k, Z95);
            let rhs = (hi_run.mean[j] - lo_run.mean[j]) / span;
            let rhs_se = (hi_run.stderr[j].powi(2) + lo_run.stderr[j].powi(2)).sqrt() / span;
            let z = z_score(p, se, rhs, rhs_se);
            max_z = max_z.max(z.abs());
            report.rows.push(
                ReportRow::new(format!("level_t{tag}"), f64::from(level), p, se, rhs)
                    .with_interval(wlo, whi)
                    .with_z(rhs_se, z),
            );
            if stationary {
                let (pr, pl) = (setup.sampler.left(), setup.sampler.right());
                let exact = (pl.cdf(level - 1) - pr.cdf(level - 1)) / span;
                let exact_se = (exact * (1.0 - exact) / k as f64).sqrt();
                let z = z_score(p, 0.0, exact, exact_se);
                max_exact_z = max_exact_z.max(z.abs());
                report.rows.push(
                    ReportRow::new(format!("stationary_t{tag}"), f64::from(level), p, se, exact)
                        .with_interval(wlo, whi)
                        .with_z(exact_se, z),
                );
            }
        }
    }
    report.checks.push(Check::at_most("max_abs_z", max_z, cfg.z_threshold));
    if stationary {
        report
            .checks
            .push(Check::at_most("stationary_max_abs_z", max_exact_z, cfg.z_threshold).informative());
    }

    let counts: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| {
            let mut c = vec![0.0; (seen_hi - seen_lo + 1) as usize];
            for &w in s {
                c[(w - seen_lo) as usize] += 1.0;
            }
            c
        })
        .collect();
    let zero = times.iter().position(|&t| t == 0.0);
    let pairs: Vec<(usize, usize)> = (0..times.len())
        .flat_map(|a| ((a + 1)..times.len()).map(move |b| (a, b)))
        .collect();
    let tests = pairs.len() + usize::from(zero.is_some());
    let alpha = if tests > 0 { CHI2_LEVEL / tests as f64 } else { CHI2_LEVEL };
    let mut chi2 = Vec::new();
    for &(a, b) in &pairs {
        let (stat, df, p) = homogeneity(&counts[a], &counts[b]);
        let name = format!("chi2_t{}_vs_t{}", label_time(times[a]), label_time(times[b]));
        let check = Check::at_least(name.clone(), p, alpha);
        report.checks.push(if stationary { check } else { check.informative() });
        chi2.push(serde_json::json!({"test": name, "statistic": stat, "df": df, "p_value": p}));
    }
    if let (Some(i), Some(hat)) = (zero, setup.sampler.hat()) {
        let mass = hat.total_mass();
        let probs: Vec<f64> = (seen_lo..=seen_hi).map(|w| hat.first_marginal(w) / mass).collect();
        let (stat, df, p) = goodness_of_fit(&counts[i], &probs);
        report.checks.push(Check::at_least("chi2_t0_vs_hat_marginal", p, alpha));
        chi2.push(serde_json::json!({"test": "chi2_t0_vs_hat_marginal", "statistic": stat, "df": df, "p_value": p}));
    }
    report.meta("times", &times);
    report.meta("levels", [level_lo, level_hi]);
    report.meta("stationary_family", stationary);
    report.meta("bonferroni_alpha", alpha);
    report.meta("chi2", chi2);
    Ok(report.finish())
}
