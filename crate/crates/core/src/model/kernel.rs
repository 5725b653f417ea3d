use std::fmt;
use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Signed number of first class particles at a site.
pub type Occupancy = i32;

/// Jump rate as a function of the occupancies on both ends of a bond.
pub type RateFn = Arc<dyn Fn(Occupancy, Occupancy) -> f64 + Send + Sync>;

/// One-site state space `[omin, omax]` plus the finite window used for simulation.
///
/// `None` stands for an infinite bound. When a bound is finite the simulation
/// bound coincides with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupancyRange {
    pub omin: Option<Occupancy>,
    pub omax: Option<Occupancy>,
    pub sim_floor: Occupancy,
    pub sim_cap: Occupancy,
}

impl OccupancyRange {
    pub fn new(
        omin: Option<Occupancy>,
        omax: Option<Occupancy>,
        sim_floor: Occupancy,
        sim_cap: Occupancy,
    ) -> Result<Self, ModelError> {
        let range = Self {
            omin,
            omax,
            sim_floor,
            sim_cap,
        };
        range.validate()?;
        Ok(range)
    }

    /// Finite state space `{omin, ..., omax}`.
    pub fn bounded(omin: Occupancy, omax: Occupancy) -> Result<Self, ModelError> {
        Self::new(Some(omin), Some(omax), omin, omax)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if let (Some(lo), Some(hi)) = (self.omin, self.omax) {
            if lo >= hi {
                return Err(ModelError::InvalidRange(format!("omin {lo} must be below omax {hi}")));
            }
        }
        if self.sim_floor >= self.sim_cap {
            return Err(ModelError::InvalidRange(format!(
                "simulation floor {} must be below cap {}",
                self.sim_floor, self.sim_cap
            )));
        }
        if let Some(lo) = self.omin {
            if lo != self.sim_floor {
                return Err(ModelError::InvalidRange(format!(
                    "finite omin {lo} requires sim_floor = omin, got {}",
                    self.sim_floor
                )));
            }
        }
        if let Some(hi) = self.omax {
            if hi != self.sim_cap {
                return Err(ModelError::InvalidRange(format!(
                    "finite omax {hi} requires sim_cap = omax, got {}",
                    self.sim_cap
                )));
            }
        }
        Ok(())
    }

    pub fn is_bounded(&self) -> bool {
        self.omin.is_some() && self.omax.is_some()
    }

    pub fn contains(&self, x: Occupancy) -> bool {
        self.sim_floor <= x && x <= self.sim_cap
    }

    /// Membership in the untruncated state space.
    pub fn in_state_space(&self, x: Occupancy) -> bool {
        self.omin.map_or(true, |lo| x >= lo) && self.omax.map_or(true, |hi| x <= hi)
    }

    pub fn iter(&self) -> RangeInclusive<Occupancy> {
        self.sim_floor..=self.sim_cap
    }

    pub fn len(&self) -> usize {
        (self.sim_cap - self.sim_floor + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, x: Occupancy) -> usize {
        debug_assert!(self.contains(x));
        (x - self.sim_floor) as usize
    }
}

/// The pair of nearest-neighbour jump rates `p` (right) and `q` (left).
#[derive(Clone)]
pub struct RateKernel {
    p: RateFn,
    q: RateFn,
    range: OccupancyRange,
}

impl fmt::Debug for RateKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RateKernel").field("range", &self.range).finish_non_exhaustive()
    }
}

impl RateKernel {
    pub fn new<P, Q>(range: OccupancyRange, p: P, q: Q) -> Result<Self, ModelError>
    where
        P: Fn(Occupancy, Occupancy) -> f64 + Send + Sync + 'static,
        Q: Fn(Occupancy, Occupancy) -> f64 + Send + Sync + 'static,
    {
        range.validate()?;
        let kernel = Self {
            p: Arc::new(p),
            q: Arc::new(q),
            range,
        };
        for a in range.iter() {
            for b in range.iter() {
                let (rp, rq) = (kernel.p(a, b), kernel.q(a, b));
                if !(rp.is_finite() && rp >= 0.0 && rq.is_finite() && rq >= 0.0) {
                    return Err(ModelError::InvalidRate { a, b, p: rp, q: rq });
                }
            }
        }
        Ok(kernel)
    }

    #[inline]
    pub fn p(&self, a: Occupancy, b: Occupancy) -> f64 {
        (self.p)(a, b)
    }

    #[inline]
    pub fn q(&self, a: Occupancy, b: Occupancy) -> f64 {
        (self.q)(a, b)
    }

    pub fn range(&self) -> &OccupancyRange {
        &self.range
    }

    fn pairs(&self) -> impl Iterator<Item = (Occupancy, Occupancy)> + '_ {
        self.range.iter().flat_map(move |a| self.range.iter().map(move |b| (a, b)))
    }

    /// `p` vanishes on the whole truncated support.
    pub fn p_vanishes(&self) -> bool {
        self.pairs().all(|(a, b)| self.p(a, b) == 0.0)
    }

    pub fn q_vanishes(&self) -> bool {
        self.pairs().all(|(a, b)| self.q(a, b) == 0.0)
    }

    /// `q(a,b) = p(b,a)` on the truncated support.
    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.q(a, b) == self.p(b, a))
    }

    /// Largest bond rate `p + q` over occupancies in `[lo, hi]` (clamped to the support).
    pub fn max_bond_rate_on(&self, lo: Occupancy, hi: Occupancy) -> f64 {
        let lo = lo.max(self.range.sim_floor);
        let hi = hi.min(self.range.sim_cap);
        let mut best = 0.0f64;
        for a in lo..=hi {
            for b in lo..=hi {
                best = best.max(self.p(a, b) + self.q(a, b));
            }
        }
        best
    }

    pub fn max_bond_rate(&self) -> f64 {
        self.max_bond_rate_on(self.range.sim_floor, self.range.sim_cap)
    }

    /// Scans the truncated support for pairs where positivity of `p`/`q` does
    /// not match the boundary pattern. Totally asymmetric kernels may have one
    /// of the two rates identically zero.
    pub fn check_non_degeneracy(&self) -> Result<(), ModelError> {
        let r = self.range;
        let p_zero = self.p_vanishes();
        let q_zero = self.q_vanishes();
        if p_zero && q_zero {
            return Err(ModelError::Degenerate("both p and q vanish".into()));
        }
        for (a, b) in self.pairs() {
            if !p_zero {
                let expect = r.omin.map_or(true, |lo| a > lo) && r.omax.map_or(true, |hi| b < hi);
                if (self.p(a, b) > 0.0) != expect {
                    return Err(ModelError::Degenerate(format!(
                        "p({a},{b}) = {} but positivity expected = {expect}",
                        self.p(a, b)
                    )));
                }
            }
            if !q_zero {
                let expect = r.omin.map_or(true, |lo| b > lo) && r.omax.map_or(true, |hi| a < hi);
                if (self.q(a, b) > 0.0) != expect {
                    return Err(ModelError::Degenerate(format!(
                        "q({a},{b}) = {} but positivity expected = {expect}",
                        self.q(a, b)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Dense copy of a kernel on its truncated support, used by the event engine.
#[derive(Clone, Debug)]
pub struct RateTable {
    floor: Occupancy,
    cap: Occupancy,
    width: usize,
    pq: Vec<[f64; 2]>,
}

impl RateTable {
    pub fn from_kernel(kernel: &RateKernel) -> Self {
        let r = kernel.range();
        let width = r.len();
        let mut pq = Vec::with_capacity(width * width);
        for a in r.iter() {
            for b in r.iter() {
                pq.push([kernel.p(a, b), kernel.q(a, b)]);
            }
        }
        Self {
            floor: r.sim_floor,
            cap: r.sim_cap,
            width,
            pq,
        }
    }

    #[inline]
    fn idx(&self, a: Occupancy, b: Occupancy) -> usize {
        debug_assert!(a >= self.floor && a <= self.cap && b >= self.floor && b <= self.cap);
        (a - self.floor) as usize * self.width + (b - self.floor) as usize
    }

    /// `[p(a, b), q(a, b)]`.
    #[inline]
    pub fn pq(&self, a: Occupancy, b: Occupancy) -> [f64; 2] {
        self.pq[self.idx(a, b)]
    }

    #[inline]
    pub fn p(&self, a: Occupancy, b: Occupancy) -> f64 {
        self.pq(a, b)[0]
    }

    #[inline]
    pub fn q(&self, a: Occupancy, b: Occupancy) -> f64 {
        self.pq(a, b)[1]
    }

    pub fn floor(&self) -> Occupancy {
        self.floor
    }

    pub fn cap(&self) -> Occupancy {
        self.cap
    }
}
