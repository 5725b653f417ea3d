use serde::Serialize;

use super::{FluxTable, HydroError, ProfileKind, SimilarityProfile};

/// Coefficient `k` in `du/dt = k * Laplacian d(u)`.
pub const PARABOLIC_FACTOR: f64 = 0.5;

/// Domain half width in units of `sqrt(t)`.
const DOMAIN: f64 = 8.0;
const CELLS: usize = 1600;
/// Largest accepted sup-difference between the run and its half-step rerun.
const RICHARDSON_LIMIT: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct ParabolicSolution {
    pub profile: SimilarityProfile,
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    /// Sup-norm change when the time step is halved.
    pub richardson: f64,
}

fn run(d: &FluxTable, rho: f64, lambda: f64, t: f64, dx: f64, steps: usize) -> Vec<f64> {
    let n = CELLS + 1;
    let dt = t / steps as f64;
    let mut u: Vec<f64> = (0..n)
        .map(|i| match (2 * i).cmp(&CELLS) {
            std::cmp::Ordering::Less => rho,
            std::cmp::Ordering::Equal => 0.5 * (rho + lambda),
            std::cmp::Ordering::Greater => lambda,
        })
        .collect();
    let mut dv: Vec<f64> = u.iter().map(|&v| d.eval(v)).collect();
    let (dl, dr) = (d.eval(rho), d.eval(lambda));
    let r = PARABOLIC_FACTOR * dt / (dx * dx);
    for _ in 0..steps {
        for i in 0..n {
            let left = if i == 0 { dl } else { dv[i - 1] };
            let right = if i + 1 == n { dr } else { dv[i + 1] };
            u[i] += r * (left - 2.0 * dv[i] + right);
        }
        for i in 0..n {
            dv[i] = d.eval(u[i]);
        }
    }
    u
}

/// Similarity profile `U(y) = u(y sqrt(t), t)` of
/// `du/dt = PARABOLIC_FACTOR * Laplacian d(u)` from the step datum.
pub fn parabolic_solve(d: &FluxTable, rho: f64, lambda: f64, t: f64) -> Result<ParabolicSolution, HydroError> {
    if !(rho > lambda) {
        return Err(HydroError::DensityOrder { rho, lambda });
    }
    if !(t > 0.0) {
        return Err(HydroError::NonPositiveTime(t));
    }
    d.check_inside(rho)?;
    d.check_inside(lambda)?;
    let mut max_slope: f64 = 0.0;
    for (g, s) in d.grid().windows(2).zip(d.slopes()) {
        if g[1] < lambda || g[0] > rho {
            continue;
        }
        if s < -1e-12 * (1.0 + s.abs()) {
            return Err(HydroError::NonMonotoneDiffusivity { u0: g[0], u1: g[1] });
        }
        max_slope = max_slope.max(s);
    }
    let max_slope = max_slope.max(1e-12);
    let half = DOMAIN * t.sqrt();
    let dx = 2.0 * half / CELLS as f64;
    let limit = dx * dx / (2.0 * max_slope);
    let steps = (t / limit).ceil() as usize;
    let dt = t / steps as f64;
    if PARABOLIC_FACTOR * dt * max_slope / (dx * dx) > 0.5 {
        return Err(HydroError::StepTooLarge { dt, limit });
    }
    let u = run(d, rho, lambda, t, dx, steps);
    let fine = run(d, rho, lambda, t, dx, 2 * steps);
    let richardson = u.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if !richardson.is_finite() || richardson > RICHARDSON_LIMIT {
        return Err(HydroError::Unstable(richardson));
    }
    let scale = t.sqrt();
    let mut knots: Vec<(f64, f64)> = fine
        .iter()
        .enumerate()
        .map(|(i, &v)| ((-half + i as f64 * dx) / scale, v.clamp(lambda, rho)))
        .collect();
    for i in 1..knots.len() {
        knots[i].1 = knots[i].1.min(knots[i - 1].1);
    }
    let profile = SimilarityProfile::new(ProfileKind::Parabolic, rho, lambda, knots, Vec::new())?;
    Ok(ParabolicSolution {
        profile,
        dx,
        dt: dt / 2.0,
        steps: 2 * steps,
        richardson,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::normal_cdf;

    #[test]
    fn linear_diffusivity_gives_error_function() {
        let d = FluxTable::from_fn("linear", -1.0, 1.0, |u| u).unwrap();
        let sol = parabolic_solve(&d, 1.0, -1.0, 1.0).unwrap();
        for y in [-2.0, -0.7, 0.0, 0.4, 1.9] {
            // variance PARABOLIC_FACTOR * 2 * t
            let want = 1.0 - 2.0 * normal_cdf(y / (2.0 * PARABOLIC_FACTOR).sqrt());
            assert!((sol.profile.u(y) - want).abs() < 1e-3, "y={y}");
        }
        assert!(sol.richardson < 1e-4);
    }

    #[test]
    fn profile_is_self_similar() {
        let d = FluxTable::from_fn("zr", 0.0, 3.0, |u| u / (1.0 + u)).unwrap();
        let a = parabolic_solve(&d, 3.0, 0.0, 1.0).unwrap();
        let b = parabolic_solve(&d, 3.0, 0.0, 4.0).unwrap();
        for y in [-1.0, 0.0, 1.5] {
            assert!((a.profile.u(y) - b.profile.u(y)).abs() < 1e-6);
        }
    }

    #[test]
    fn decreasing_diffusivity_refused() {
        let d = FluxTable::from_fn("bad", 0.0, 1.0, |u| -u).unwrap();
        assert!(matches!(
            parabolic_solve(&d, 1.0, 0.0, 1.0),
            Err(HydroError::NonMonotoneDiffusivity { .. })
        ));
    }
}
