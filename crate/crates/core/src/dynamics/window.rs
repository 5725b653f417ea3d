use serde::Serialize;
use statrs::distribution::{DiscreteCDF, Poisson};

use super::estimate::normal_cdf;
use crate::measures::Pmf;
use crate::model::{Occupancy, RateKernel};

/// Sites added beyond the propagation estimate.
pub const WINDOW_MARGIN: i32 = 10;

/// Quantile level defining the bulk occupancy range used for `R_max`.
pub const BULK_QUANTILE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    Ballistic,
    Diffusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WindowPlan {
    pub half_width: i32,
    pub r_max: f64,
    pub t: f64,
    pub scaling: Scaling,
    /// Bound on the chance that boundary influence reaches the centre.
    pub tail_bound: f64,
}

/// `L = ceil(R t + 6 sqrt(R t)) + margin`, with a Poisson tail bound.
pub fn ballistic_window(r_max: f64, t: f64) -> WindowPlan {
    let rt = r_max * t;
    let half_width = (rt + 6.0 * rt.sqrt()).ceil() as i32 + WINDOW_MARGIN;
    WindowPlan {
        half_width,
        r_max,
        t,
        scaling: Scaling::Ballistic,
        tail_bound: poisson_tail(rt, half_width - WINDOW_MARGIN),
    }
}

/// `L = ceil(6 sqrt(2 R t)) + margin` for symmetric kernels, with a Gaussian tail bound.
pub fn diffusive_window(r_max: f64, t: f64) -> WindowPlan {
    let sd = (2.0 * r_max * t).sqrt();
    let half_width = (6.0 * sd).ceil() as i32 + WINDOW_MARGIN;
    let tail = if sd > 0.0 {
        2.0 * (1.0 - normal_cdf(f64::from(half_width - WINDOW_MARGIN) / sd))
    } else {
        0.0
    };
    WindowPlan {
        half_width,
        r_max,
        t,
        scaling: Scaling::Diffusive,
        tail_bound: tail,
    }
}

/// `P(Poisson(mean) >= k)`.
pub fn poisson_tail(mean: f64, k: i32) -> f64 {
    if mean <= 0.0 {
        return if k <= 0 { 1.0 } else { 0.0 };
    }
    if k <= 0 {
        return 1.0;
    }
    Poisson::new(mean).map(|p| p.sf((k - 1) as u64)).unwrap_or(1.0)
}

/// Occupancy interval carrying all but `BULK_QUANTILE` of each marginal.
pub fn bulk_interval(pmfs: &[&Pmf]) -> (Occupancy, Occupancy) {
    let mut lo = Occupancy::MAX;
    let mut hi = Occupancy::MIN;
    for p in pmfs {
        let a = (p.floor()..=p.cap()).find(|&y| p.cdf(y) > BULK_QUANTILE).unwrap_or(p.floor());
        let b = (p.floor()..=p.cap()).rev().find(|&y| p.sf(y - 1) > BULK_QUANTILE).unwrap_or(p.cap());
        lo = lo.min(a);
        hi = hi.max(b);
    }
    (lo, hi)
}

/// Largest bond rate with both occupancies in the bulk range of `pmfs`.
pub fn bulk_rate(kernel: &RateKernel, pmfs: &[&Pmf]) -> f64 {
    let (lo, hi) = bulk_interval(pmfs);
    kernel.max_bond_rate_on(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ballistic_rule() {
        let w = ballistic_window(1.0, 200.0);
        assert_eq!(w.half_width, (200.0 + 6.0 * 200f64.sqrt()).ceil() as i32 + 10);
        assert!(w.tail_bound < 1e-6);
    }

    #[test]
    fn poisson_tail_oracle() {
        // P(Poisson(1) >= 2) = 1 - 2/e
        assert!((poisson_tail(1.0, 2) - (1.0 - 2.0 / std::f64::consts::E)).abs() < 1e-12);
        assert_eq!(poisson_tail(3.0, 0), 1.0);
    }

    #[test]
    fn diffusive_rule() {
        let w = diffusive_window(2.0, 100.0);
        assert_eq!(w.half_width, 130);
        assert!(w.tail_bound < 1e-8);
    }
}
