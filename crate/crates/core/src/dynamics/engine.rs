use rand::Rng;
use serde::Serialize;

use super::config::{Configuration, CoupledState};
use super::sumtree::SumTree;
use super::DynamicsError;
use crate::model::{check_attractiveness, ModelSpec, Occupancy, RateKernel, RateTable};

/// Shared read-only rate data for simulating one model.
#[derive(Clone, Debug)]
pub struct Dynamics {
    table: RateTable,
    attractive: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EvolveStats {
    pub events: u64,
}

#[inline]
fn exp_draw<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}

impl Dynamics {
    pub fn new(kernel: &RateKernel) -> Self {
        Self {
            table: RateTable::from_kernel(kernel),
            attractive: check_attractiveness(kernel).passed(),
        }
    }

    pub fn for_model(model: &ModelSpec) -> Self {
        Self::new(&model.kernel)
    }

    pub fn is_attractive(&self) -> bool {
        self.attractive
    }

    pub fn table(&self) -> &RateTable {
        &self.table
    }

    fn check_config(&self, c: &Configuration) -> Result<(), DynamicsError> {
        for site in c.sites() {
            let x = c.at(site);
            if x < self.table.floor() || x > self.table.cap() {
                return Err(DynamicsError::OutOfSupport { site, occupancy: x });
            }
        }
        Ok(())
    }

    #[inline]
    fn in_support(&self, x: Occupancy) -> bool {
        x >= self.table.floor() && x <= self.table.cap()
    }

    #[inline]
    fn single_rate(&self, occ: &[Occupancy], b: usize) -> f64 {
        let [p, q] = self.table.pq(occ[b], occ[b + 1]);
        p + q
    }

    /// Runs a single system until `t_end`; window edges are closed.
    pub fn evolve_single<R: Rng + ?Sized>(
        &self,
        cfg: &mut Configuration,
        t_end: f64,
        rng: &mut R,
    ) -> Result<EvolveStats, DynamicsError> {
        if t_end < cfg.time {
            return Err(DynamicsError::TimeReversed { now: cfg.time, t_end });
        }
        self.check_config(cfg)?;
        let nb = cfg.occupancies().len() - 1;
        let rates: Vec<f64> = (0..nb).map(|b| self.single_rate(cfg.occupancies(), b)).collect();
        let mut tree = SumTree::from_weights(&rates);
        let mut stats = EvolveStats::default();
        let mut t = cfg.time;
        loop {
            let total = tree.total();
            if total <= 0.0 {
                break;
            }
            t += exp_draw(rng, total);
            if t > t_end {
                break;
            }
            let (b, r) = tree.find(rng.random::<f64>() * total);
            let occ = cfg.occ_mut();
            let (a, c) = (occ[b], occ[b + 1]);
            let p = self.table.p(a, c);
            let dir: i32 = if r < p { 1 } else { -1 };
            let (na, nc) = (a - dir, c + dir);
            if !self.in_support(na) || !self.in_support(nc) {
                cfg.time = t;
                let site = if self.in_support(na) { b + 1 } else { b } as i32 - cfg.half_width();
                return Err(DynamicsError::Truncation { site, time: t });
            }
            occ[b] = na;
            occ[b + 1] = nc;
            cfg.current_mut()[b] += i64::from(dir);
            stats.events += 1;
            let occ = cfg.occupancies();
            let (lo, hi) = (b.saturating_sub(1), (b + 1).min(nb - 1));
            let mut buf = [0.0; 3];
            for (k, slot) in (lo..=hi).zip(buf.iter_mut()) {
                *slot = self.single_rate(occ, k);
            }
            tree.set_run(lo, &buf[..=hi - lo]);
        }
        cfg.time = t_end;
        Ok(stats)
    }

    #[inline]
    fn coupled_rate(&self, up: &[Occupancy], lo: &[Occupancy], b: usize) -> f64 {
        let [pu, qu] = self.table.pq(up[b], up[b + 1]);
        let [pl, ql] = self.table.pq(lo[b], lo[b + 1]);
        pu.max(pl) + qu.max(ql)
    }

    /// Runs both systems under the basic coupling until `t_end`.
    ///
    /// With `check_order` set and an ordered start, every event is checked to
    /// keep `lower <= upper`.
    pub fn evolve_coupled<R: Rng + ?Sized>(
        &self,
        state: &mut CoupledState,
        t_end: f64,
        rng: &mut R,
        check_order: bool,
    ) -> Result<EvolveStats, DynamicsError> {
        if !self.attractive {
            return Err(DynamicsError::NotAttractive);
        }
        let now = state.time();
        if t_end < now {
            return Err(DynamicsError::TimeReversed { now, t_end });
        }
        self.check_config(&state.upper)?;
        self.check_config(&state.lower)?;
        let check_order = check_order && state.is_ordered();
        let half_width = state.upper.half_width();
        let nb = state.upper.occupancies().len() - 1;
        let rates: Vec<f64> = (0..nb)
            .map(|b| self.coupled_rate(state.upper.occupancies(), state.lower.occupancies(), b))
            .collect();
        let mut tree = SumTree::from_weights(&rates);
        let mut stats = EvolveStats::default();
        let mut t = now;
        loop {
            let total = tree.total();
            if total <= 0.0 {
                break;
            }
            t += exp_draw(rng, total);
            if t > t_end {
                break;
            }
            let (b, mut r) = tree.find(rng.random::<f64>() * total);
            let (ua, uc) = (state.upper.occupancies()[b], state.upper.occupancies()[b + 1]);
            let (la, lc) = (state.lower.occupancies()[b], state.lower.occupancies()[b + 1]);
            let tb = &self.table;
            let ([pu, qu], [pl, ql]) = (tb.pq(ua, uc), tb.pq(la, lc));
            let (mut move_up, mut move_lo, dir);
            let pmax = pu.max(pl);
            if r < pmax {
                dir = 1;
                move_up = pu > r;
                move_lo = pl > r;
            } else {
                r -= pmax;
                dir = -1;
                move_up = qu > r;
                move_lo = ql > r;
            }
            if !move_up && !move_lo {
                // rounding at the top of the leaf
                move_up = true;
                move_lo = false;
                let (qu, ql) = if dir == 1 { (pu, pl) } else { (qu, ql) };
                if ql > qu {
                    std::mem::swap(&mut move_up, &mut move_lo);
                }
            }
            let (d0, d1) = (state.diff(b), state.diff(b + 1));
            if move_up {
                let (na, nc) = (ua - dir, uc + dir);
                if !self.in_support(na) || !self.in_support(nc) {
                    state.upper.time = t;
                    state.lower.time = t;
                    let site = if self.in_support(na) { b + 1 } else { b } as i32 - half_width;
                    return Err(DynamicsError::Truncation { site, time: t });
                }
                let occ = state.upper.occ_mut();
                occ[b] = na;
                occ[b + 1] = nc;
                state.upper.current_mut()[b] += i64::from(dir);
            }
            if move_lo {
                let (na, nc) = (la - dir, lc + dir);
                if !self.in_support(na) || !self.in_support(nc) {
                    state.upper.time = t;
                    state.lower.time = t;
                    let site = if self.in_support(na) { b + 1 } else { b } as i32 - half_width;
                    return Err(DynamicsError::Truncation { site, time: t });
                }
                let occ = state.lower.occ_mut();
                occ[b] = na;
                occ[b + 1] = nc;
                state.lower.current_mut()[b] += i64::from(dir);
            }
            state.note_change(b, d0);
            state.note_change(b + 1, d1);
            stats.events += 1;
            if check_order && (state.diff(b) < 0 || state.diff(b + 1) < 0) {
                state.upper.time = t;
                state.lower.time = t;
                return Err(DynamicsError::OrderViolated {
                    site: b as i32 - half_width,
                    time: t,
                });
            }
            let (up, low) = (state.upper.occupancies(), state.lower.occupancies());
            let (lo, hi) = (b.saturating_sub(1), (b + 1).min(nb - 1));
            let mut buf = [0.0; 3];
            for (k, slot) in (lo..=hi).zip(buf.iter_mut()) {
                *slot = self.coupled_rate(up, low, k);
            }
            tree.set_run(lo, &buf[..=hi - lo]);
        }
        state.upper.time = t_end;
        state.lower.time = t_end;
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::model::{build_model, ModelName};

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn particles_conserved_and_currents_consistent() {
        let m = build_model(ModelName::ZrLinear, &params(&[("p", 0.6)])).unwrap();
        let dyn_ = Dynamics::for_model(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut c = Configuration::from_fn(10, |i| if i == 0 { 5 } else { (i.rem_euclid(3)) as i32 });
        let start = c.clone();
        dyn_.evolve_single(&mut c, 4.0, &mut rng).unwrap();
        assert_eq!(c.total_particles(), start.total_particles());
        for site in -10..10 {
            let inflow = if site > -10 { c.current(site - 1) } else { 0 };
            let delta = i64::from(c.at(site) - start.at(site));
            assert_eq!(delta, inflow - c.current(site));
        }
        assert_eq!(c.time, 4.0);
    }

    #[test]
    fn coupled_single_discrepancy_and_height_invariant() {
        let m = build_model(ModelName::TwoType, &params(&[("c", 0.25)])).unwrap();
        let dyn_ = Dynamics::for_model(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lower = Configuration::from_fn(20, |i| if i < 0 { 1 } else if i == 0 { 0 } else { -1 });
        let mut upper = lower.clone();
        upper.occ_mut()[20] = 1;
        let mut s = CoupledState::new(upper, lower);
        for step in 1..=40 {
            dyn_.evolve_coupled(&mut s, f64::from(step) * 0.1, &mut rng, true).unwrap();
            let q = s.track_q().unwrap();
            for n in -6..6 {
                let diff = s.upper().height(n) - s.lower().height(n);
                assert_eq!(diff, i64::from(q > n), "n={n} q={q}");
            }
        }
    }

    #[test]
    fn truncation_is_reported() {
        let m = build_model(ModelName::ZrConst, &BTreeMap::new()).unwrap();
        let m = crate::model::build_model_with(m.name, &BTreeMap::new(), Some(crate::model::Truncation { floor: 0, cap: 2 })).unwrap();
        let dyn_ = Dynamics::for_model(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut c = Configuration::from_fn(3, |_| 2);
        let err = dyn_.evolve_single(&mut c, 10.0, &mut rng).unwrap_err();
        assert!(matches!(err, DynamicsError::Truncation { .. }));
    }

    #[test]
    fn non_attractive_kernel_refused_in_coupled_mode() {
        let range = crate::model::OccupancyRange::bounded(-1, 1).unwrap();
        let k = RateKernel::new(
            range,
            |a, b| match (a, b) {
                (0, 0) => 0.6,
                (0, -1) | (1, 0) => 0.5,
                (1, -1) => 1.0,
                _ => 0.0,
            },
            |_, _| 0.0,
        )
        .unwrap();
        let dyn_ = Dynamics::new(&k);
        let c = Configuration::from_fn(2, |_| 0);
        let mut s = CoupledState::new(c.clone(), c);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            dyn_.evolve_coupled(&mut s, 1.0, &mut rng, false),
            Err(DynamicsError::NotAttractive)
        ));
    }
}
