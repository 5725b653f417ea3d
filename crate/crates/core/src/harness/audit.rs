use super::{Check, ComparisonReport, ExperimentConfig, HarnessError, ReportRow};
use crate::measures::{bar_nu, coupling_exists, find_violation_everywhere, hat_nu, CouplingVerdict, MarginalFamily};

/// Tolerance of the algebraic checks.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

fn worst(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v) })
}

/// Algebraic checks of the one-site marginals and the coupling measures.
pub fn run_measure_audit(cfg: &ExperimentConfig) -> Result<ComparisonReport, HarnessError> {
    let model = cfg.model.build()?;
    let family = cfg.family.build(&model)?;
    let grid = &cfg.audit;
    let mut report = ComparisonReport::new("measure_audit");

    let mut mean_err: f64 = 0.0;
    let mut norm_err: f64 = 0.0;
    for &rho in &grid.densities {
        let pmf = family.pmf(rho)?;
        let mass: f64 = pmf.probs().iter().sum();
        let (dm, dn) = ((pmf.mean() - rho).abs(), (mass - 1.0).abs());
        mean_err = mean_err.max(dm);
        norm_err = norm_err.max(dn);
        report.rows.push(ReportRow::new("mean", rho, pmf.mean(), 0.0, rho));
        report.rows.push(ReportRow::new("mass", rho, mass, 0.0, 1.0));
    }
    if !grid.densities.is_empty() {
        report.checks.push(Check::at_most("reconstruction_error", mean_err, ALGEBRAIC_TOL));
        report.checks.push(Check::at_most("normalization_error", norm_err, ALGEBRAIC_TOL));
    }

    let mut marginal_err: f64 = 0.0;
    let mut hat_err: f64 = 0.0;
    let mut dominance = true;
    let mut verdicts = Vec::new();
    for &[rho, lambda] in &grid.pairs {
        let (pr, pl) = (family.pmf(rho)?, family.pmf(lambda)?);
        let bar = bar_nu(&family, rho, lambda)?;
        let hat = hat_nu(&family, rho, lambda)?;
        let (lo, hi) = (pr.floor().min(pl.floor()), pr.cap().max(pl.cap()));
        marginal_err = marginal_err.max(worst((lo..=hi).flat_map(|x| {
            [(bar.first_marginal(x) - pr.prob(x)).abs(), (bar.second_marginal(x) - pl.prob(x)).abs()]
        })));
        hat_err = hat_err.max((hat.total_mass() - 1.0).abs());
        hat_err = hat_err.max(worst(
            (lo..=hi).map(|y| (hat.weight(y + 1, y) * (rho - lambda) - (pl.cdf(y) - pr.cdf(y)).max(0.0)).abs()),
        ));
        let dominated = (lo..=hi).all(|y| pr.cdf(y) <= pl.cdf(y) + ALGEBRAIC_TOL);
        dominance &= dominated;
        let verdict = if lambda >= rho - 1.0 {
            Some(coupling_exists(&family, rho, lambda)?)
        } else {
            None
        };
        let witness = match verdict {
            Some(CouplingVerdict::Witness { y, .. }) => f64::from(y),
            _ => f64::NAN,
        };
        report.rows.push(ReportRow::new(
            format!("coupling_{rho}_{lambda}"),
            witness,
            f64::from(u8::from(verdict.is_some_and(|v| v.exists()))),
            0.0,
            f64::from(u8::from(grid.coupling_expected.contains(&[rho, lambda]))),
        ));
        verdicts.push(serde_json::json!({"rho": rho, "lambda": lambda, "dominated": dominated, "coupling": verdict}));
    }
    if !grid.pairs.is_empty() {
        report.checks.push(Check::at_most("bar_marginal_error", marginal_err, ALGEBRAIC_TOL));
        report.checks.push(Check::at_most("hat_table_error", hat_err, ALGEBRAIC_TOL));
        report.checks.push(Check::flag("stochastic_dominance", dominance));
    }
    for &[rho, lambda] in &grid.coupling_expected {
        let exists = coupling_exists(&family, rho, lambda)?.exists();
        report
            .checks
            .push(Check::flag(format!("coupling_exists_{rho}_{lambda}"), exists));
    }

    let mut witnesses = Vec::new();
    for case in &grid.violations {
        let found = find_violation_everywhere(case.family, case.rho, case.lambda, case.cap);
        let name = format!("violation_{:?}_{}_{}", case.family, case.rho, case.lambda).to_lowercase();
        let y = found.as_ref().ok().copied();
        report.checks.push(Check::flag(name.clone(), y.is_some()));
        report.rows.push(ReportRow::new(
            name,
            y.map_or(f64::NAN, f64::from),
            f64::from(u8::from(y.is_some())),
            0.0,
            1.0,
        ));
        witnesses.push(serde_json::json!({"family": case.family, "rho": case.rho, "lambda": case.lambda, "witness": y}));
    }

    if let Some(g) = &grid.gaussian {
        let dg = MarginalFamily::discrete_gaussian(g.beta, g.half_width)?;
        let mut shift_err: f64 = 0.0;
        for &rho in &g.densities {
            let upper = dg.pmf_at_theta(dg.theta_of_rho(rho)?);
            let lower = dg.pmf_at_theta(dg.theta_of_rho(rho - 1.0)?);
            let (lo, hi) = (upper.floor() + 1, upper.cap());
            let err = worst((lo..=hi).map(|x| (upper.prob(x) - lower.prob(x - 1)).abs()));
            shift_err = shift_err.max(err);
            report.rows.push(ReportRow::new("gaussian_shift", rho, err, 0.0, 0.0));
        }
        report.checks.push(Check::at_most("gaussian_shift_error", shift_err, ALGEBRAIC_TOL));
    }
    report.meta("pairs", verdicts);
    report.meta("witnesses", witnesses);
    Ok(report.finish())
}
