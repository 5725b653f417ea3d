use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::MeasureError;
use crate::model::{ModelSpec, Occupancy, OccupancyRange};

/// Largest tail mass outside the simulation support accepted for a density.
pub const TAIL_THRESHOLD: f64 = 1e-9;

const THETA_TOL: f64 = 1e-12;
const MEAN_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyMode {
    Gibbs,
    ExplicitTable,
}

/// A one-site distribution on an integer interval, with cached CDF and
/// survival function.
#[derive(Clone, Debug)]
pub struct Pmf {
    floor: Occupancy,
    probs: Vec<f64>,
    cdf: Vec<f64>,
    sf: Vec<f64>,
    mean: f64,
    variance: f64,
    tail_mass: f64,
    theta: f64,
}

impl Pmf {
    /// Normalizes `weights` (indexed from `floor`) into a distribution.
    pub fn from_weights(floor: Occupancy, weights: Vec<f64>, theta: f64, tail_mass: f64) -> Self {
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let n = probs.len();
        let mut cdf = vec![0.0; n];
        let mut acc = 0.0;
        for (c, p) in cdf.iter_mut().zip(&probs) {
            acc += p;
            *c = acc.min(1.0);
        }
        let mut sf = vec![0.0; n];
        let mut acc = 0.0;
        for i in (0..n).rev() {
            sf[i] = acc;
            acc += probs[i];
        }
        let mean = probs
            .iter()
            .enumerate()
            .map(|(i, p)| p * f64::from(floor + i as Occupancy))
            .sum::<f64>();
        let variance = probs
            .iter()
            .enumerate()
            .map(|(i, p)| p * (f64::from(floor + i as Occupancy) - mean).powi(2))
            .sum::<f64>();
        Self {
            floor,
            probs,
            cdf,
            sf,
            mean,
            variance,
            tail_mass,
            theta,
        }
    }

    pub fn point_mass(floor: Occupancy, cap: Occupancy, at: Occupancy, theta: f64) -> Self {
        let mut w = vec![0.0; (cap - floor + 1) as usize];
        w[(at - floor) as usize] = 1.0;
        Self::from_weights(floor, w, theta, 0.0)
    }

    pub fn floor(&self) -> Occupancy {
        self.floor
    }

    pub fn cap(&self) -> Occupancy {
        self.floor + self.probs.len() as Occupancy - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: Occupancy) -> f64 {
        if x < self.floor || x > self.cap() {
            0.0
        } else {
            self.probs[(x - self.floor) as usize]
        }
    }

    /// `P(X <= y)`.
    pub fn cdf(&self, y: Occupancy) -> f64 {
        if y < self.floor {
            0.0
        } else if y >= self.cap() {
            1.0
        } else {
            self.cdf[(y - self.floor) as usize]
        }
    }

    /// `P(X > y)`, accumulated from the top for accuracy in the upper tail.
    pub fn sf(&self, y: Occupancy) -> f64 {
        if y < self.floor {
            1.0
        } else if y >= self.cap() {
            0.0
        } else {
            self.sf[(y - self.floor) as usize]
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Mass discarded by truncating to the simulation support.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Chemical potential (infinite for point masses at a finite bound, NaN for tables).
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn iter(&self) -> impl Iterator<Item = (Occupancy, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.floor + i as Occupancy, p))
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Occupancy {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u);
        self.floor + i.min(self.probs.len() - 1) as Occupancy
    }
}

/// `CDF_a(ya) - CDF_b(yb)`, taken from whichever tail keeps precision.
pub(crate) fn cdf_difference(a: &Pmf, ya: Occupancy, b: &Pmf, yb: Occupancy) -> f64 {
    let (ca, cb) = (a.cdf(ya), b.cdf(yb));
    if ca.max(cb) <= 0.5 {
        ca - cb
    } else {
        b.sf(yb) - a.sf(ya)
    }
}

#[derive(Clone)]
struct GibbsFamily {
    label: String,
    ext_floor: Occupancy,
    energy: Arc<Vec<f64>>,
}

/// User-supplied marginals: one distribution per tabulated density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitTable {
    pub floor: Occupancy,
    pub cap: Occupancy,
    pub tables: Vec<Vec<f64>>,
}

#[derive(Clone)]
enum Source {
    Gibbs(GibbsFamily),
    Explicit { table: ExplicitTable, pmfs: Vec<Pmf> },
}

/// Density-parametrized family of one-site marginals.
#[derive(Clone)]
pub struct MarginalFamily {
    support: OccupancyRange,
    source: Source,
    domain: (f64, f64),
}

impl fmt::Debug for MarginalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarginalFamily")
            .field("label", &self.label())
            .field("support", &self.support)
            .field("domain", &self.domain)
            .finish()
    }
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

impl MarginalFamily {
    /// Gibbs family `exp(theta x + E(x))` on `support`.
    ///
    /// Unbounded directions are extended beyond the simulation bounds to
    /// measure the discarded tail.
    pub fn gibbs<E>(label: impl Into<String>, support: OccupancyRange, energy: E) -> Result<Self, MeasureError>
    where
        E: Fn(Occupancy) -> f64,
    {
        let width = support.sim_cap - support.sim_floor;
        let pad = width.max(64);
        let ext_floor = if support.omin.is_some() { support.sim_floor } else { support.sim_floor - pad };
        let ext_cap = if support.omax.is_some() { support.sim_cap } else { support.sim_cap + pad };
        let energy: Vec<f64> = (ext_floor..=ext_cap).map(&energy).collect();
        if energy.iter().any(|e| e.is_nan() || *e == f64::INFINITY) {
            return Err(MeasureError::InvalidFamily("energy must be finite or -inf".into()));
        }
        let mut family = Self {
            support,
            source: Source::Gibbs(GibbsFamily {
                label: label.into(),
                ext_floor,
                energy: Arc::new(energy),
            }),
            domain: (0.0, 0.0),
        };
        family.domain = family.gibbs_domain();
        Ok(family)
    }

    /// Stationary product marginal of a misanthrope model.
    pub fn from_model(model: &ModelSpec) -> Result<Self, MeasureError> {
        let triple = model
            .misanthrope
            .as_ref()
            .ok_or_else(|| MeasureError::NoStationaryFamily(model.name.to_string()))?;
        let f = triple.f.clone();
        let range = *model.range();
        let energy = move |x: Occupancy| {
            if !range.in_state_space(x) {
                return f64::NEG_INFINITY;
            }
            let mut e = 0.0;
            for y in (x + 1)..=0 {
                e += f(y).ln();
            }
            for z in 1..=x {
                e -= f(z).ln();
            }
            e
        };
        Self::gibbs(model.name.to_string(), range, energy)
    }

    pub fn geometric(cap: Occupancy) -> Result<Self, MeasureError> {
        let support = OccupancyRange::new(Some(0), None, 0, cap)?;
        Self::gibbs("geometric", support, |_| 0.0)
    }

    pub fn poisson(cap: Occupancy) -> Result<Self, MeasureError> {
        let support = OccupancyRange::new(Some(0), None, 0, cap)?;
        Self::gibbs("poisson", support, |x| -statrs::function::factorial::ln_factorial(x.max(0) as u64))
    }

    pub fn bernoulli() -> Self {
        Self::gibbs("bernoulli", OccupancyRange::bounded(0, 1).expect("valid range"), |_| 0.0)
            .expect("bernoulli family")
    }

    /// `exp(-beta x^2 / 2)` weights on `[-half_width, half_width]` (within Z).
    pub fn discrete_gaussian(beta: f64, half_width: Occupancy) -> Result<Self, MeasureError> {
        let support = OccupancyRange::new(None, None, -half_width, half_width)?;
        Self::gibbs("discrete_gaussian", support, move |x| -beta * f64::from(x).powi(2) / 2.0)
    }

    /// Family given by tabulated distributions. Tables must be normalized, have
    /// distinct means and be stochastically ordered.
    pub fn explicit(table: ExplicitTable) -> Result<Self, MeasureError> {
        let support = OccupancyRange::bounded(table.floor, table.cap)?;
        let width = (table.cap - table.floor + 1) as usize;
        if table.tables.is_empty() {
            return Err(MeasureError::InvalidFamily("explicit family has no tables".into()));
        }
        let mut pmfs = Vec::with_capacity(table.tables.len());
        for (i, w) in table.tables.iter().enumerate() {
            if w.len() != width {
                return Err(MeasureError::InvalidFamily(format!("table {i} has {} entries, expected {width}", w.len())));
            }
            if w.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(MeasureError::InvalidFamily(format!("table {i} has a negative or non-finite weight")));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(MeasureError::InvalidFamily(format!("table {i} sums to {total}")));
            }
            pmfs.push(Pmf::from_weights(table.floor, w.clone(), f64::NAN, 0.0));
        }
        let mut order: Vec<usize> = (0..pmfs.len()).collect();
        order.sort_by(|&a, &b| pmfs[a].mean().total_cmp(&pmfs[b].mean()));
        for pair in order.windows(2) {
            let (lo, hi) = (&pmfs[pair[0]], &pmfs[pair[1]]);
            if hi.mean() - lo.mean() <= MEAN_TOL {
                return Err(MeasureError::InvalidFamily("two tables share a density".into()));
            }
            for y in table.floor..=table.cap {
                if lo.cdf(y) < hi.cdf(y) - 1e-12 {
                    return Err(MeasureError::InvalidFamily(format!(
                        "tables at densities {} and {} are not stochastically ordered at {y}",
                        lo.mean(),
                        hi.mean()
                    )));
                }
            }
        }
        let sorted_table = ExplicitTable {
            floor: table.floor,
            cap: table.cap,
            tables: order.iter().map(|&i| table.tables[i].clone()).collect(),
        };
        let pmfs: Vec<Pmf> = order.iter().map(|&i| pmfs[i].clone()).collect();
        let domain = (pmfs[0].mean(), pmfs[pmfs.len() - 1].mean());
        Ok(Self {
            support,
            source: Source::Explicit {
                table: sorted_table,
                pmfs,
            },
            domain,
        })
    }

    pub fn explicit_table(&self) -> Option<&ExplicitTable> {
        match &self.source {
            Source::Explicit { table, .. } => Some(table),
            Source::Gibbs(_) => None,
        }
    }

    pub fn mode(&self) -> FamilyMode {
        match self.source {
            Source::Gibbs(_) => FamilyMode::Gibbs,
            Source::Explicit { .. } => FamilyMode::ExplicitTable,
        }
    }

    pub fn label(&self) -> &str {
        match &self.source {
            Source::Gibbs(g) => &g.label,
            Source::Explicit { .. } => "explicit",
        }
    }

    pub fn support(&self) -> &OccupancyRange {
        &self.support
    }

    /// Attainable densities `[lo, hi]` of the truncated family.
    pub fn density_domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Unnormalized Gibbs weight `exp(theta x + E(x))`.
    pub fn weight(&self, theta: f64, x: Occupancy) -> f64 {
        match &self.source {
            Source::Gibbs(g) => {
                let i = x - g.ext_floor;
                if i < 0 || i as usize >= g.energy.len() {
                    return 0.0;
                }
                (theta * f64::from(x) + g.energy[i as usize]).exp()
            }
            Source::Explicit { .. } => f64::NAN,
        }
    }

    fn gibbs_parts(&self) -> &GibbsFamily {
        match &self.source {
            Source::Gibbs(g) => g,
            Source::Explicit { .. } => unreachable!("gibbs-only path"),
        }
    }

    /// Truncated pmf at chemical potential `theta`, plus lower and upper tail masses.
    fn gibbs_at(&self, theta: f64) -> (Pmf, f64, f64) {
        let g = self.gibbs_parts();
        let lw = |x: Occupancy| theta * f64::from(x) + g.energy[(x - g.ext_floor) as usize];
        let ext_cap = g.ext_floor + g.energy.len() as Occupancy - 1;
        let (lo, hi) = (self.support.sim_floor, self.support.sim_cap);
        let total = log_sum_exp((g.ext_floor..=ext_cap).map(lw));
        let inner = log_sum_exp((lo..=hi).map(lw));
        let lower = (g.ext_floor..lo).map(|x| (lw(x) - total).exp()).sum::<f64>();
        let upper = ((hi + 1)..=ext_cap).map(|x| (lw(x) - total).exp()).sum::<f64>();
        let weights: Vec<f64> = (lo..=hi).map(|x| (lw(x) - inner).exp()).collect();
        (Pmf::from_weights(lo, weights, theta, lower + upper), lower, upper)
    }

    pub fn pmf_at_theta(&self, theta: f64) -> Pmf {
        self.gibbs_at(theta).0
    }

    fn gibbs_domain(&self) -> (f64, f64) {
        let s = self.support;
        let hi = if s.omax.is_some() {
            f64::from(s.sim_cap)
        } else {
            let t = bisect_monotone(|th| self.gibbs_at(th).2 <= TAIL_THRESHOLD, true);
            self.gibbs_at(t).0.mean()
        };
        let lo = if s.omin.is_some() {
            f64::from(s.sim_floor)
        } else {
            let t = bisect_monotone(|th| self.gibbs_at(th).1 <= TAIL_THRESHOLD, false);
            self.gibbs_at(t).0.mean()
        };
        (lo, hi)
    }

    fn check_domain(&self, rho: f64) -> Result<(), MeasureError> {
        let (lo, hi) = self.domain;
        let slack = 1e-12 * (1.0 + rho.abs());
        if !rho.is_finite() || rho < lo - slack || rho > hi + slack {
            return Err(MeasureError::DensityOutOfDomain { rho, lo, hi });
        }
        Ok(())
    }

    /// Chemical potential with truncated mean `rho`, found by bisection.
    pub fn theta_of_rho(&self, rho: f64) -> Result<f64, MeasureError> {
        self.check_domain(rho)?;
        if matches!(self.source, Source::Explicit { .. }) {
            return Err(MeasureError::InvalidFamily("explicit tables have no chemical potential".into()));
        }
        let s = self.support;
        if s.omin.is_some() && rho <= f64::from(s.sim_floor) {
            return Ok(f64::NEG_INFINITY);
        }
        if s.omax.is_some() && rho >= f64::from(s.sim_cap) {
            return Ok(f64::INFINITY);
        }
        let mean = |th: f64| self.gibbs_at(th).0.mean();
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        while mean(lo) > rho {
            lo *= 2.0;
            if lo < -1e6 {
                return Err(MeasureError::DensityOutOfDomain { rho, lo: self.domain.0, hi: self.domain.1 });
            }
        }
        while mean(hi) < rho {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(MeasureError::DensityOutOfDomain { rho, lo: self.domain.0, hi: self.domain.1 });
            }
        }
        while hi - lo > THETA_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if mean(mid) < rho {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// The distribution `nu^rho` on the simulation support.
    pub fn pmf(&self, rho: f64) -> Result<Pmf, MeasureError> {
        self.check_domain(rho)?;
        match &self.source {
            Source::Explicit { pmfs, .. } => pmfs
                .iter()
                .find(|p| (p.mean() - rho).abs() <= MEAN_TOL)
                .cloned()
                .ok_or_else(|| MeasureError::DensityNotTabulated(rho)),
            Source::Gibbs(_) => {
                let s = self.support;
                let theta = self.theta_of_rho(rho)?;
                if theta == f64::NEG_INFINITY {
                    return Ok(Pmf::point_mass(s.sim_floor, s.sim_cap, s.sim_floor, theta));
                }
                if theta == f64::INFINITY {
                    return Ok(Pmf::point_mass(s.sim_floor, s.sim_cap, s.sim_cap, theta));
                }
                let pmf = self.pmf_at_theta(theta);
                if pmf.tail_mass() > TAIL_THRESHOLD {
                    return Err(MeasureError::TailTooHeavy {
                        rho,
                        tail: pmf.tail_mass(),
                    });
                }
                Ok(pmf)
            }
        }
    }

    pub fn cdf(&self, rho: f64, y: Occupancy) -> Result<f64, MeasureError> {
        Ok(self.pmf(rho)?.cdf(y))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rho: f64, rng: &mut R) -> Result<Occupancy, MeasureError> {
        Ok(self.pmf(rho)?.sample(rng))
    }
}

/// Bisection for the boundary of `{theta : ok(theta)}` where `ok` holds on a
/// half line (`increasing = true`: ok for small theta).
fn bisect_monotone(ok: impl Fn(f64) -> bool, increasing: bool) -> f64 {
    let dir = if increasing { 1.0 } else { -1.0 };
    let mut good = 0.0;
    let mut step = 1.0;
    while !ok(good) {
        good -= dir * step;
        step *= 2.0;
    }
    let mut bad = good + dir;
    let mut step = 1.0;
    while ok(bad) {
        good = bad;
        step *= 2.0;
        bad += dir * step;
        if bad.abs() > 1e6 {
            return good;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (good + bad);
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
        if (good - bad).abs() < 1e-13 {
            break;
        }
    }
    good
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::model::{build_model, ModelName};

    #[test]
    fn geometric_theta_closed_form() {
        let g = MarginalFamily::geometric(160).unwrap();
        let th = g.theta_of_rho(1.0).unwrap();
        assert!((th - 0.5f64.ln()).abs() < 1e-10);
        let pmf = g.pmf(1.0).unwrap();
        assert!((pmf.cdf(2) - 7.0 / 8.0).abs() < 1e-10);
        for y in 0..20 {
            assert!((pmf.cdf(y) - (1.0 - 0.5f64.powi(y + 1))).abs() < 1e-10);
        }
    }

    #[test]
    fn poisson_theta_closed_form() {
        let p = MarginalFamily::poisson(160).unwrap();
        let th = p.theta_of_rho(2.0).unwrap();
        assert!((th - 2.0f64.ln()).abs() < 1e-10);
        assert!((p.pmf(2.0).unwrap().mean() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn bernoulli_basics() {
        let b = MarginalFamily::bernoulli();
        assert!(b.theta_of_rho(0.5).unwrap().abs() < 1e-12);
        assert!((b.cdf(0.3, 0).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(b.density_domain(), (0.0, 1.0));
        let one = b.pmf(1.0).unwrap();
        assert_eq!(one.cdf(0), 0.0);
        assert_eq!(b.pmf(0.0).unwrap().cdf(0), 1.0);
    }

    #[test]
    fn two_type_stationary_weights() {
        let c: f64 = 0.25;
        let m = build_model(ModelName::TwoType, &[("c".to_string(), c)].into_iter().collect()).unwrap();
        let fam = MarginalFamily::from_model(&m).unwrap();
        let th = 0.3;
        let pmf = fam.pmf_at_theta(th);
        let w = [c * (-th).exp(), 1.0, th.exp()];
        let z: f64 = w.iter().sum();
        for (i, x) in (-1..=1).enumerate() {
            assert!((pmf.prob(x) - w[i] / z).abs() < 1e-14);
        }
        let zero = fam.pmf(0.0).unwrap();
        assert!((zero.prob(0) - 1.0 / (1.0 + 2.0 * c.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn theta_strictly_increasing_and_dominance() {
        let fams = [
            MarginalFamily::geometric(160).unwrap(),
            MarginalFamily::poisson(160).unwrap(),
            MarginalFamily::bernoulli(),
            MarginalFamily::discrete_gaussian(1.0, 25).unwrap(),
        ];
        for fam in &fams {
            let (lo, hi) = fam.density_domain();
            let (a, b) = (lo.max(-5.0) + 0.05, hi.min(5.0) - 0.05);
            let grid: Vec<f64> = (0..=20).map(|k| a + (b - a) * f64::from(k) / 20.0).collect();
            let mut last = f64::NEG_INFINITY;
            let mut last_pmf: Option<Pmf> = None;
            for &rho in &grid {
                let th = fam.theta_of_rho(rho).unwrap();
                assert!(th > last, "{}", fam.label());
                last = th;
                let pmf = fam.pmf(rho).unwrap();
                assert!((pmf.mean() - rho).abs() < 1e-10, "{} {rho}", fam.label());
                if let Some(prev) = &last_pmf {
                    for y in fam.support().iter() {
                        assert!(prev.cdf(y) >= pmf.cdf(y) - 1e-15);
                    }
                }
                last_pmf = Some(pmf);
            }
        }
    }

    #[test]
    fn heavy_tail_refused() {
        let g = MarginalFamily::geometric(40).unwrap();
        let (_, hi) = g.density_domain();
        // (r/(1+r))^41 = 1e-9
        let oracle = {
            let a = (1e-9f64).powf(1.0 / 41.0);
            a / (1.0 - a)
        };
        assert!((hi - oracle).abs() < 1e-3 * oracle, "{hi} {oracle}");
        assert!(matches!(g.pmf(3.0), Err(MeasureError::DensityOutOfDomain { .. })));
    }

    #[test]
    fn sampler_mean() {
        let p = MarginalFamily::poisson(160).unwrap();
        let pmf = p.pmf(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let s: i64 = (0..n).map(|_| i64::from(pmf.sample(&mut rng))).sum();
        let mean = s as f64 / n as f64;
        let se = (2.0f64 / n as f64).sqrt();
        assert!((mean - 2.0).abs() < 3.0 * se, "{mean}");
    }

    #[test]
    fn explicit_round_trip_and_validation() {
        let table = ExplicitTable {
            floor: 0,
            cap: 2,
            tables: vec![vec![0.2, 0.5, 0.3], vec![0.6, 0.3, 0.1]],
        };
        let fam = MarginalFamily::explicit(table.clone()).unwrap();
        assert_eq!(fam.mode(), FamilyMode::ExplicitTable);
        let json = serde_json::to_string(fam.explicit_table().unwrap()).unwrap();
        let back: ExplicitTable = serde_json::from_str(&json).unwrap();
        let fam2 = MarginalFamily::explicit(back).unwrap();
        assert_eq!(fam.explicit_table(), fam2.explicit_table());
        assert!((fam.density_domain().0 - 0.5).abs() < 1e-12);
        assert!((fam.cdf(1.1, 0).unwrap() - 0.2).abs() < 1e-12);
        assert!(matches!(fam.pmf(0.8), Err(MeasureError::DensityNotTabulated(_))));

        let crossing = ExplicitTable {
            floor: 0,
            cap: 2,
            tables: vec![vec![0.3, 0.0, 0.7], vec![0.2, 0.8, 0.0]],
        };
        assert!(matches!(MarginalFamily::explicit(crossing), Err(MeasureError::InvalidFamily(_))));
    }
}
