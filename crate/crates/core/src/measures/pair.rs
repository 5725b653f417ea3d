use rand::Rng;
use serde::{Deserialize, Serialize};

use super::family::{cdf_difference, MarginalFamily, Pmf};
use super::MeasureError;
use crate::model::Occupancy;

/// Tolerance for treating a computed CDF gap as non-negative.
pub const COUPLING_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Hat,
    Bar,
    Diagonal,
}

/// Weights on occupancy pairs `(x, y)` with `x - y` in `{0, 1}`.
///
/// `diag[i]` is the weight of `(y, y)` and `off[i]` the weight of `(y + 1, y)`
/// for `y = floor + i`.
#[derive(Clone, Debug)]
pub struct PairMarginal {
    kind: PairKind,
    floor: Occupancy,
    diag: Vec<f64>,
    off: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairWeight {
    pub x: Occupancy,
    pub y: Occupancy,
    pub weight: f64,
}

impl PairMarginal {
    pub fn kind(&self) -> PairKind {
        self.kind
    }

    pub fn floor(&self) -> Occupancy {
        self.floor
    }

    pub fn cap(&self) -> Occupancy {
        self.floor + self.diag.len() as Occupancy - 1
    }

    pub fn weight(&self, x: Occupancy, y: Occupancy) -> f64 {
        if y < self.floor || y > self.cap() {
            return 0.0;
        }
        let i = (y - self.floor) as usize;
        match x - y {
            0 => self.diag[i],
            1 => self.off[i],
            _ => 0.0,
        }
    }

    pub fn diagonal_weights(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal_weights(&self) -> &[f64] {
        &self.off
    }

    pub fn total_mass(&self) -> f64 {
        self.diag.iter().sum::<f64>() + self.off.iter().sum::<f64>()
    }

    pub fn off_diagonal_mass(&self) -> f64 {
        self.off.iter().sum()
    }

    /// Non-zero entries in `(y, x)` order.
    pub fn entries(&self) -> Vec<PairWeight> {
        let mut out = Vec::new();
        for (i, (&d, &o)) in self.diag.iter().zip(&self.off).enumerate() {
            let y = self.floor + i as Occupancy;
            if d != 0.0 {
                out.push(PairWeight { x: y, y, weight: d });
            }
            if o != 0.0 {
                out.push(PairWeight { x: y + 1, y, weight: o });
            }
        }
        out
    }

    /// First-coordinate marginal.
    pub fn first_marginal(&self, x: Occupancy) -> f64 {
        self.weight(x, x) + self.weight(x, x - 1)
    }

    /// Second-coordinate marginal.
    pub fn second_marginal(&self, y: Occupancy) -> f64 {
        self.weight(y, y) + self.weight(y + 1, y)
    }

    /// Draws `(x, y)` from a non-negative table by inverse CDF.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Occupancy, Occupancy) {
        let total = self.total_mass();
        let mut u: f64 = rng.random::<f64>() * total;
        let mut last = (self.floor, self.floor);
        for (i, (&d, &o)) in self.diag.iter().zip(&self.off).enumerate() {
            let y = self.floor + i as Occupancy;
            if d > 0.0 {
                if u < d {
                    return (y, y);
                }
                u -= d;
                last = (y, y);
            }
            if o > 0.0 {
                if u < o {
                    return (y + 1, y);
                }
                u -= o;
                last = (y + 1, y);
            }
        }
        last
    }
}

fn ordered(rho: f64, lambda: f64) -> Result<(), MeasureError> {
    if rho > lambda {
        Ok(())
    } else {
        Err(MeasureError::DensityOrder { rho, lambda })
    }
}

/// The coupling marginal of the second class particle site: weight
/// `(CDF_lambda(y) - CDF_rho(y)) / (rho - lambda)` on `(y + 1, y)`.
///
/// Normalized by the computed gap sum, which equals `rho - lambda` up to the
/// mean inversion tolerance.
pub fn hat_nu(family: &MarginalFamily, rho: f64, lambda: f64) -> Result<PairMarginal, MeasureError> {
    ordered(rho, lambda)?;
    let (pr, pl) = (family.pmf(rho)?, family.pmf(lambda)?);
    Ok(hat_from_pmfs(&pr, &pl))
}

pub(crate) fn hat_from_pmfs(pr: &Pmf, pl: &Pmf) -> PairMarginal {
    debug_assert_eq!(pr.floor(), pl.floor());
    let (floor, n) = (pr.floor(), pr.probs().len());
    let mut off: Vec<f64> = (0..n)
        .map(|i| {
            let y = floor + i as Occupancy;
            cdf_difference(pl, y, pr, y).max(0.0)
        })
        .collect();
    let total: f64 = off.iter().sum();
    for w in &mut off {
        *w /= total;
    }
    PairMarginal {
        kind: PairKind::Hat,
        floor,
        diag: vec![0.0; n],
        off,
    }
}

/// Signed pair table with marginals `nu^rho` and `nu^lambda`.
pub fn bar_nu(family: &MarginalFamily, rho: f64, lambda: f64) -> Result<PairMarginal, MeasureError> {
    ordered(rho, lambda)?;
    let (pr, pl) = (family.pmf(rho)?, family.pmf(lambda)?);
    Ok(bar_from_pmfs(&pr, &pl))
}

pub(crate) fn bar_from_pmfs(pr: &Pmf, pl: &Pmf) -> PairMarginal {
    debug_assert_eq!(pr.floor(), pl.floor());
    let (floor, n) = (pr.floor(), pr.probs().len());
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n);
    for i in 0..n {
        let y = floor + i as Occupancy;
        diag.push(cdf_difference(pr, y, pl, y - 1));
        off.push(cdf_difference(pl, y, pr, y));
    }
    PairMarginal {
        kind: PairKind::Bar,
        floor,
        diag,
        off,
    }
}

/// `nu^{rho,rho}`: both coordinates equal, distributed as `nu^rho`.
pub fn diagonal(family: &MarginalFamily, rho: f64) -> Result<PairMarginal, MeasureError> {
    let p = family.pmf(rho)?;
    let n = p.probs().len();
    Ok(PairMarginal {
        kind: PairKind::Diagonal,
        floor: p.floor(),
        diag: p.probs().to_vec(),
        off: vec![0.0; n],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CouplingVerdict {
    Exists,
    Witness { y: Occupancy, gap: f64 },
}

impl CouplingVerdict {
    pub fn exists(&self) -> bool {
        matches!(self, CouplingVerdict::Exists)
    }
}

/// Whether `CDF_rho(y) >= CDF_lambda(y - 1)` on the whole support.
pub fn coupling_exists(family: &MarginalFamily, rho: f64, lambda: f64) -> Result<CouplingVerdict, MeasureError> {
    ordered(rho, lambda)?;
    if lambda < rho - 1.0 {
        return Err(MeasureError::DensityOrder { rho, lambda });
    }
    let bar = bar_nu(family, rho, lambda)?;
    for (i, &d) in bar.diag.iter().enumerate() {
        if d < -COUPLING_TOL {
            return Ok(CouplingVerdict::Witness {
                y: bar.floor + i as Occupancy,
                gap: d,
            });
        }
    }
    Ok(CouplingVerdict::Exists)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationFamily {
    Geometric,
    Poisson,
}

/// Smallest `y >= 0` with `CDF_rho(y) < CDF_lambda(y - 1)` for geometric or
/// Poisson marginals, scanning up to the truncation bound.
pub fn find_violation_everywhere(
    kind: ViolationFamily,
    rho: f64,
    lambda: f64,
    cap: Occupancy,
) -> Result<Occupancy, MeasureError> {
    if !(rho > lambda && lambda >= 0.0) {
        return Err(MeasureError::DensityOrder { rho, lambda });
    }
    let family = match kind {
        ViolationFamily::Geometric => MarginalFamily::geometric(cap)?,
        ViolationFamily::Poisson => MarginalFamily::poisson(cap)?,
    };
    let bar = bar_nu(&family, rho, lambda)?;
    bar.diag
        .iter()
        .position(|&d| d < 0.0)
        .map(|i| bar.floor + i as Occupancy)
        .ok_or(MeasureError::NoWitness { rho, lambda, cap })
}

/// Limit of `hat_nu(rho, lambda)` as `lambda` increases to `rho`.
pub fn hat_nu_prime(family: &MarginalFamily, rho: f64) -> Result<PairMarginal, MeasureError> {
    let p = family.pmf(rho)?;
    let var = p.variance();
    if var <= 0.0 {
        return Err(MeasureError::ZeroVariance(rho));
    }
    let n = p.probs().len();
    let mut off = vec![0.0; n];
    let mut acc = 0.0;
    for i in (0..n).rev() {
        off[i] = acc / var;
        let z = p.floor() + i as Occupancy;
        acc += (f64::from(z) - p.mean()) * p.probs()[i];
    }
    Ok(PairMarginal {
        kind: PairKind::Hat,
        floor: p.floor(),
        diag: vec![0.0; n],
        off,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exclusion_tables() {
        let b = MarginalFamily::bernoulli();
        let hat = hat_nu(&b, 0.8, 0.2).unwrap();
        assert!((hat.weight(1, 0) - 1.0).abs() < 1e-12);
        let bar = bar_nu(&b, 0.8, 0.2).unwrap();
        assert!((bar.weight(0, 0) - 0.2).abs() < 1e-12);
        assert!((bar.weight(1, 1) - 0.2).abs() < 1e-12);
        assert!((bar.weight(1, 0) - 0.6).abs() < 1e-12);
        assert!(coupling_exists(&b, 0.8, 0.2).unwrap().exists());
        assert!(coupling_exists(&b, 1.0, 0.0).unwrap().exists());
        let prime = hat_nu_prime(&b, 0.5).unwrap();
        assert!((prime.weight(1, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_tables() {
        let g = MarginalFamily::geometric(160).unwrap();
        let hat = hat_nu(&g, 1.0, 0.5).unwrap();
        assert!((hat.weight(1, 0) - 1.0 / 3.0).abs() < 1e-9);
        let bar = bar_nu(&g, 1.0, 0.5).unwrap();
        assert!((bar.weight(2, 2) + 1.0 / 72.0).abs() < 1e-9);
        assert!((bar.off_diagonal_mass() - 0.5).abs() < 1e-9);
        match coupling_exists(&g, 1.0, 0.5).unwrap() {
            CouplingVerdict::Witness { y, .. } => assert_eq!(y, 2),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn violation_witnesses() {
        assert_eq!(find_violation_everywhere(ViolationFamily::Geometric, 1.0, 0.5, 160).unwrap(), 2);
        assert_eq!(find_violation_everywhere(ViolationFamily::Geometric, 0.2, 0.1, 160).unwrap(), 3);
        assert_eq!(find_violation_everywhere(ViolationFamily::Poisson, 2.0, 1.0, 160).unwrap(), 2);
    }

    #[test]
    fn bricklayers_hat_is_shifted_marginal() {
        let dg = MarginalFamily::discrete_gaussian(1.0, 25).unwrap();
        let hat = hat_nu(&dg, 1.0, 0.0).unwrap();
        let low = dg.pmf(0.0).unwrap();
        for y in -10..=10 {
            assert!((hat.weight(y + 1, y) - low.prob(y)).abs() < 1e-12);
        }
        assert!(coupling_exists(&dg, 1.0, 0.0).unwrap().exists());
    }

    #[test]
    fn hat_prime_is_limit_of_hat() {
        let g = MarginalFamily::geometric(160).unwrap();
        let prime = hat_nu_prime(&g, 1.0).unwrap();
        assert!((prime.total_mass() - 1.0).abs() < 1e-12);
        for eps in [1e-2, 1e-3] {
            let hat = hat_nu(&g, 1.0, 1.0 - eps).unwrap();
            let sup = (0..40).map(|y| (hat.weight(y + 1, y) - prime.weight(y + 1, y)).abs()).fold(0.0, f64::max);
            assert!(sup <= 10.0 * eps, "{eps} {sup}");
        }
    }

    #[test]
    fn order_errors() {
        let b = MarginalFamily::bernoulli();
        assert!(matches!(hat_nu(&b, 0.2, 0.8), Err(MeasureError::DensityOrder { .. })));
        assert!(matches!(bar_nu(&b, 0.5, 0.5), Err(MeasureError::DensityOrder { .. })));
    }
}
