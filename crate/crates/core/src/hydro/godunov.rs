use serde::Serialize;

use super::{FluxTable, HydroError, SimilarityProfile};

/// Courant number used for the time step.
const CFL: f64 = 0.9;

/// Range minimum and maximum over the flux table values.
struct SparseExtrema {
    min: Vec<Vec<f64>>,
    max: Vec<Vec<f64>>,
}

impl SparseExtrema {
    fn new(values: &[f64]) -> Self {
        let mut min = vec![values.to_vec()];
        let mut max = vec![values.to_vec()];
        let mut w = 1;
        while 2 * w <= values.len() {
            let (pm, px) = (min.last().unwrap(), max.last().unwrap());
            let n = values.len() + 1 - 2 * w;
            min.push((0..n).map(|i| pm[i].min(pm[i + w])).collect());
            max.push((0..n).map(|i| px[i].max(px[i + w])).collect());
            w *= 2;
        }
        Self { min, max }
    }

    /// `(min, max)` over indices `lo..=hi`.
    fn query(&self, lo: usize, hi: usize) -> (f64, f64) {
        let k = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        let j = hi + 1 - (1 << k);
        (self.min[k][lo].min(self.min[k][j]), self.max[k][lo].max(self.max[k][j]))
    }
}

struct GodunovFlux<'a> {
    table: &'a FluxTable,
    extrema: SparseExtrema,
}

impl GodunovFlux<'_> {
    /// Exact Godunov flux of the interpolated `G` between `ul` and `ur`.
    fn at(&self, ul: f64, ur: f64) -> f64 {
        let (gl, gr) = (self.table.eval(ul), self.table.eval(ur));
        if ul == ur {
            return gl;
        }
        let (a, b) = if ul < ur { (ul, ur) } else { (ur, ul) };
        let grid = self.table.grid();
        let lo = grid.partition_point(|&g| g <= a);
        let hi = grid.partition_point(|&g| g < b);
        let (mut mn, mut mx) = (gl.min(gr), gl.max(gr));
        if lo < hi {
            let (m, x) = self.extrema.query(lo, hi - 1);
            mn = mn.min(m);
            mx = mx.max(x);
        }
        if ul < ur {
            mn
        } else {
            mx
        }
    }
}

/// First-order finite-volume evolution of a step datum.
#[derive(Clone, Debug, Serialize)]
pub struct GodunovRun {
    /// Cell centres.
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub t: f64,
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    /// Largest per-step mismatch between the change of `sum (u - lambda) dx`
    /// and the boundary fluxes.
    pub max_mass_defect: f64,
}

/// Evolves the step datum `rho` on the left, `lambda` on the right, until `t`
/// on cells of width `dx`.
pub fn godunov_oracle(flux: &FluxTable, rho: f64, lambda: f64, t: f64, dx: f64) -> Result<GodunovRun, HydroError> {
    flux.check_inside(rho)?;
    flux.check_inside(lambda)?;
    if !(t > 0.0) {
        return Err(HydroError::NonPositiveTime(t));
    }
    if !(dx > 0.0) {
        return Err(HydroError::GridTooCoarse(format!("cell width {dx}")));
    }
    let speed = flux.max_abs_slope().max(1e-6);
    let half = (speed * t * 1.1 + 10.0 * dx).max(20.0 * dx);
    let cells = 2 * (half / dx).ceil() as usize;
    let x0 = -(cells as f64) * dx / 2.0;
    let x: Vec<f64> = (0..cells).map(|i| x0 + (i as f64 + 0.5) * dx).collect();
    let mut u: Vec<f64> = x.iter().map(|&xi| if xi < 0.0 { rho } else { lambda }).collect();
    let nflux = GodunovFlux {
        table: flux,
        extrema: SparseExtrema::new(flux.values()),
    };
    let dt_max = CFL * dx / speed;
    let steps = (t / dt_max).ceil() as usize;
    let dt = t / steps as f64;
    if dt * speed / dx > 1.0 {
        return Err(HydroError::StepTooLarge { dt, limit: dx / speed });
    }
    let mut f = vec![0.0; cells + 1];
    let mut max_defect: f64 = 0.0;
    let mass = |u: &[f64]| u.iter().map(|&v| v - lambda).sum::<f64>() * dx;
    let mut m_old = mass(&u);
    for _ in 0..steps {
        f[0] = nflux.at(rho, u[0]);
        for i in 1..cells {
            f[i] = nflux.at(u[i - 1], u[i]);
        }
        f[cells] = nflux.at(u[cells - 1], lambda);
        let r = dt / dx;
        for i in 0..cells {
            u[i] -= r * (f[i + 1] - f[i]);
        }
        let m_new = mass(&u);
        max_defect = max_defect.max((m_new - m_old - dt * (f[0] - f[cells])).abs());
        m_old = m_new;
    }
    Ok(GodunovRun {
        x,
        u,
        t,
        dx,
        dt,
        steps,
        max_mass_defect: max_defect,
    })
}

impl GodunovRun {
    /// `sum |u_i - v(x_i / t)| dx`.
    pub fn l1_distance(&self, profile: &SimilarityProfile) -> f64 {
        self.x
            .iter()
            .zip(&self.u)
            .map(|(&x, &u)| (u - profile.u(profile.xi(x, self.t))).abs())
            .sum::<f64>()
            * self.dx
    }

    /// Interface with the steepest drop, as `(x, u_left, u_right)` read
    /// `reach` cells away on each side.
    pub fn steepest_drop(&self, reach: usize) -> Option<(f64, f64, f64)> {
        let n = self.u.len();
        if n < 2 * reach + 2 {
            return None;
        }
        let i = (reach..n - reach - 1).max_by(|&a, &b| {
            (self.u[a] - self.u[a + 1]).total_cmp(&(self.u[b] - self.u[b + 1]))
        })?;
        let xs = 0.5 * (self.x[i] + self.x[i + 1]);
        Some((xs, self.u[i - reach], self.u[i + 1 + reach]))
    }
}

#[cfg(test)]
mod tests {
    use super::super::riemann_solve;
    use super::*;

    #[test]
    fn sparse_extrema_match_scan() {
        let v: Vec<f64> = (0..37).map(|i| ((i * 7919) % 31) as f64 - 15.0).collect();
        let s = SparseExtrema::new(&v);
        for lo in 0..v.len() {
            for hi in lo..v.len() {
                let w = &v[lo..=hi];
                let want = (w.iter().cloned().fold(f64::INFINITY, f64::min), w.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
                assert_eq!(s.query(lo, hi), want);
            }
        }
    }

    #[test]
    fn tasep_matches_envelope() {
        let g = FluxTable::from_fn("tasep", 0.0, 1.0, |u| u * (1.0 - u)).unwrap();
        let run = godunov_oracle(&g, 1.0, 0.0, 1.0, 1e-3).unwrap();
        let p = riemann_solve(&g, 1.0, 0.0).unwrap();
        assert!(run.l1_distance(&p) <= 0.01, "{}", run.l1_distance(&p));
        assert!(run.max_mass_defect < 1e-10);
    }

    #[test]
    fn constant_data_preserved() {
        let g = FluxTable::from_fn("tasep", 0.0, 1.0, |u| u * (1.0 - u)).unwrap();
        let run = godunov_oracle(&g, 0.3, 0.3, 0.5, 1e-2).unwrap();
        assert!(run.u.iter().all(|&u| u == 0.3));
    }

    #[test]
    fn shock_speed_from_convex_flux() {
        let g = FluxTable::from_fn("convex", 0.0, 1.0, |u| u * u).unwrap();
        let run = godunov_oracle(&g, 1.0, 0.0, 1.0, 1e-3).unwrap();
        let (xs, ul, ur) = run.steepest_drop(5).unwrap();
        assert!((xs - 1.0).abs() < 2e-3, "{xs}");
        assert!((ul - ur - 1.0).abs() < 1e-6);
    }
}
