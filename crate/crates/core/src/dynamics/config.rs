use serde::Serialize;

use super::DynamicsError;
use crate::model::Occupancy;

/// Occupancies on the window `[-L, L]` together with per-bond currents.
///
/// `current[b]` is the net number of particles that crossed from site
/// `b - L` to site `b - L + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    half_width: i32,
    occ: Vec<Occupancy>,
    current: Vec<i64>,
    pub time: f64,
}

impl Configuration {
    pub fn new(half_width: i32, occ: Vec<Occupancy>) -> Self {
        assert_eq!(occ.len(), (2 * half_width + 1) as usize, "window length mismatch");
        let bonds = occ.len() - 1;
        Self {
            half_width,
            occ,
            current: vec![0; bonds],
            time: 0.0,
        }
    }

    pub fn from_fn(half_width: i32, f: impl FnMut(i32) -> Occupancy) -> Self {
        Self::new(half_width, (-half_width..=half_width).map(f).collect())
    }

    pub fn half_width(&self) -> i32 {
        self.half_width
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i32> {
        -self.half_width..=self.half_width
    }

    #[inline]
    pub fn index(&self, site: i32) -> usize {
        (site + self.half_width) as usize
    }

    /// Occupancy at `site`, or `None` outside the window.
    pub fn get(&self, site: i32) -> Option<Occupancy> {
        if site.abs() > self.half_width {
            None
        } else {
            Some(self.occ[self.index(site)])
        }
    }

    pub fn at(&self, site: i32) -> Occupancy {
        self.occ[self.index(site)]
    }

    pub fn occupancies(&self) -> &[Occupancy] {
        &self.occ
    }

    pub(crate) fn occ_mut(&mut self) -> &mut [Occupancy] {
        &mut self.occ
    }

    pub(crate) fn current_mut(&mut self) -> &mut [i64] {
        &mut self.current
    }

    /// Net signed jumps over the bond `(site, site + 1)`.
    pub fn current(&self, site: i32) -> i64 {
        self.current[self.index(site)]
    }

    pub fn total_particles(&self) -> i64 {
        self.occ.iter().map(|&x| i64::from(x)).sum()
    }

    /// Height at the half integer `m + 1/2`, normalized by `h_{1/2}(0) = 0`.
    ///
    /// Defined through the bond `(0, 1)` current and the occupancies between
    /// that bond and `m + 1/2`.
    pub fn height(&self, m: i32) -> i64 {
        let j = self.current(0);
        if m >= 0 {
            j - (1..=m).map(|i| i64::from(self.at(i))).sum::<i64>()
        } else {
            j + ((m + 1)..=0).map(|i| i64::from(self.at(i))).sum::<i64>()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub site: i32,
    pub count: u32,
    pub sign: i8,
}

/// Two coupled configurations on a common window, `upper` playing the role
/// of the configuration with the extra particle.
#[derive(Clone, Debug)]
pub struct CoupledState {
    pub(crate) upper: Configuration,
    pub(crate) lower: Configuration,
    pub(crate) disc_sites: Vec<usize>,
    pub(crate) disc_total: u64,
}

impl CoupledState {
    pub fn new(upper: Configuration, lower: Configuration) -> Self {
        assert_eq!(upper.half_width, lower.half_width, "windows differ");
        let mut state = Self {
            upper,
            lower,
            disc_sites: Vec::new(),
            disc_total: 0,
        };
        state.rebuild_discrepancies();
        state
    }

    pub(crate) fn rebuild_discrepancies(&mut self) {
        self.disc_sites.clear();
        self.disc_total = 0;
        for i in 0..self.upper.occ.len() {
            let d = self.upper.occ[i] - self.lower.occ[i];
            if d != 0 {
                self.disc_sites.push(i);
                self.disc_total += u64::from(d.unsigned_abs());
            }
        }
    }

    #[inline]
    pub(crate) fn diff(&self, i: usize) -> i32 {
        self.upper.occ[i] - self.lower.occ[i]
    }

    /// Updates the ledger after site `i` changed from difference `old`.
    #[inline]
    pub(crate) fn note_change(&mut self, i: usize, old: i32) {
        let new = self.diff(i);
        if new == old {
            return;
        }
        self.disc_total = self.disc_total - u64::from(old.unsigned_abs()) + u64::from(new.unsigned_abs());
        if old == 0 {
            self.disc_sites.push(i);
        } else if new == 0 {
            if let Some(pos) = self.disc_sites.iter().position(|&s| s == i) {
                self.disc_sites.swap_remove(pos);
            }
        }
    }

    pub fn upper(&self) -> &Configuration {
        &self.upper
    }

    pub fn lower(&self) -> &Configuration {
        &self.lower
    }

    pub fn time(&self) -> f64 {
        self.upper.time
    }

    /// Sum of `|upper_i - lower_i|` over the window.
    pub fn discrepancy_total(&self) -> u64 {
        self.disc_total
    }

    pub fn discrepancies(&self) -> Vec<Discrepancy> {
        let mut out: Vec<Discrepancy> = self
            .disc_sites
            .iter()
            .map(|&i| {
                let d = self.diff(i);
                Discrepancy {
                    site: i as i32 - self.upper.half_width,
                    count: d.unsigned_abs(),
                    sign: d.signum() as i8,
                }
            })
            .collect();
        out.sort_by_key(|d| d.site);
        out
    }

    /// Position of the lone second class particle.
    pub fn track_q(&self) -> Result<i32, DynamicsError> {
        match self.disc_sites.as_slice() {
            [i] if self.disc_total == 1 => Ok(*i as i32 - self.upper.half_width),
            _ => Err(DynamicsError::NotSingleDiscrepancy {
                total: self.disc_total,
                sites: self.disc_sites.len(),
            }),
        }
    }

    /// Whether `lower <= upper` coordinate-wise.
    pub fn is_ordered(&self) -> bool {
        self.disc_sites.iter().all(|&i| self.diff(i) > 0)
    }
}
