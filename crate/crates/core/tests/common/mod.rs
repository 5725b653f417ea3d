//! Exact transition probabilities on small closed windows by uniformization.

#![allow(dead_code)]

use scpkit::dynamics::{replica_rng, Configuration, CoupledState, Dynamics};
use scpkit::model::{ModelSpec, Occupancy};
use statrs::distribution::{Discrete, Poisson};

/// Generator of the nearest-neighbour dynamics on `sites` sites with closed ends.
pub struct SmallGenerator {
    sites: usize,
    floor: Occupancy,
    levels: usize,
    jumps: Vec<Vec<(usize, f64)>>,
    exit: Vec<f64>,
}

impl SmallGenerator {
    pub fn new(model: &ModelSpec, sites: usize) -> Self {
        let r = model.range();
        let (floor, cap) = (r.sim_floor, r.sim_cap);
        let levels = (cap - floor + 1) as usize;
        let count = levels.pow(sites as u32);
        let mut jumps = Vec::with_capacity(count);
        let mut exit = Vec::with_capacity(count);
        let k = &model.kernel;
        let mut gen = Self {
            sites,
            floor,
            levels,
            jumps: Vec::new(),
            exit: Vec::new(),
        };
        for s in 0..count {
            let x = gen.decode(s);
            let mut out = Vec::new();
            for b in 0..sites - 1 {
                let (a, c) = (x[b], x[b + 1]);
                let p = k.p(a, c);
                if p > 0.0 && a > floor && c < cap {
                    let mut y = x.clone();
                    y[b] -= 1;
                    y[b + 1] += 1;
                    out.push((gen.encode(&y), p));
                }
                let q = k.q(a, c);
                if q > 0.0 && c > floor && a < cap {
                    let mut y = x.clone();
                    y[b] += 1;
                    y[b + 1] -= 1;
                    out.push((gen.encode(&y), q));
                }
            }
            exit.push(out.iter().map(|j| j.1).sum());
            jumps.push(out);
        }
        gen.jumps = jumps;
        gen.exit = exit;
        gen
    }

    pub fn encode(&self, x: &[Occupancy]) -> usize {
        x.iter().fold(0, |acc, &v| acc * self.levels + (v - self.floor) as usize)
    }

    pub fn decode(&self, mut s: usize) -> Vec<Occupancy> {
        let mut x = vec![0; self.sites];
        for i in (0..self.sites).rev() {
            x[i] = self.floor + (s % self.levels) as Occupancy;
            s /= self.levels;
        }
        x
    }

    /// Law at time `t` from the deterministic state `start`.
    pub fn evolve(&self, start: &[Occupancy], t: f64) -> Vec<f64> {
        let rate = self.exit.iter().cloned().fold(0.0, f64::max).max(1e-12);
        let poisson = Poisson::new(rate * t).unwrap();
        let mut v = vec![0.0; self.exit.len()];
        v[self.encode(start)] = 1.0;
        let mut out = vec![0.0; v.len()];
        let mut covered = 0.0;
        let mut n = 0u64;
        while covered < 1.0 - 1e-15 && n < 100_000 {
            let w = poisson.pmf(n);
            for (o, x) in out.iter_mut().zip(&v) {
                *o += w * x;
            }
            covered += w;
            let mut next = vec![0.0; v.len()];
            for (s, &mass) in v.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                next[s] += mass * (1.0 - self.exit[s] / rate);
                for &(to, r) in &self.jumps[s] {
                    next[to] += mass * r / rate;
                }
            }
            v = next;
            n += 1;
        }
        out
    }

    /// `[site][level]` marginals of a law on the window.
    pub fn site_marginals(&self, law: &[f64]) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.levels]; self.sites];
        for (s, &p) in law.iter().enumerate() {
            for (i, &v) in self.decode(s).iter().enumerate() {
                m[i][(v - self.floor) as usize] += p;
            }
        }
        m
    }

    pub fn floor(&self) -> Occupancy {
        self.floor
    }
}

fn worst_z(counts: &[Vec<u64>], exact: &[Vec<f64>], replicas: u64) -> f64 {
    let k = replicas as f64;
    let mut worst: f64 = 0.0;
    for (row, ex) in counts.iter().zip(exact) {
        for (&c, &p) in row.iter().zip(ex) {
            let se = (p * (1.0 - p) / k).sqrt();
            let d = c as f64 / k - p;
            let z = if se > 0.0 { d / se } else if d.abs() < 1e-12 { 0.0 } else { f64::INFINITY };
            worst = worst.max(z.abs());
        }
    }
    worst
}

fn tally(counts: &mut [Vec<u64>], c: &Configuration, floor: Occupancy) {
    for (i, &v) in c.occupancies().iter().enumerate() {
        counts[i][(v - floor) as usize] += 1;
    }
}

/// Largest `|z|` between simulated and exact site marginals after time `t`.
pub fn max_marginal_z(model: &ModelSpec, start: &[Occupancy], t: f64, replicas: u64, seed: u64) -> f64 {
    assert!(start.len() % 2 == 1, "odd window");
    let gen = SmallGenerator::new(model, start.len());
    let exact = gen.site_marginals(&gen.evolve(start, t));
    let half = (start.len() / 2) as i32;
    let dynamics = Dynamics::for_model(model);
    let mut counts = vec![vec![0u64; exact[0].len()]; start.len()];
    for r in 0..replicas {
        let mut rng = replica_rng(seed, 7, r);
        let mut c = Configuration::new(half, start.to_vec());
        dynamics.evolve_single(&mut c, t, &mut rng).unwrap();
        tally(&mut counts, &c, gen.floor());
    }
    worst_z(&counts, &exact, replicas)
}

/// Same check for both components of a basic-coupling run.
pub fn max_coupled_marginal_z(
    model: &ModelSpec,
    upper: &[Occupancy],
    lower: &[Occupancy],
    t: f64,
    replicas: u64,
    seed: u64,
) -> f64 {
    let gen = SmallGenerator::new(model, upper.len());
    let exact_up = gen.site_marginals(&gen.evolve(upper, t));
    let exact_lo = gen.site_marginals(&gen.evolve(lower, t));
    let half = (upper.len() / 2) as i32;
    let dynamics = Dynamics::for_model(model);
    let mut up = vec![vec![0u64; exact_up[0].len()]; upper.len()];
    let mut lo = up.clone();
    for r in 0..replicas {
        let mut rng = replica_rng(seed, 8, r);
        let mut state = CoupledState::new(
            Configuration::new(half, upper.to_vec()),
            Configuration::new(half, lower.to_vec()),
        );
        dynamics.evolve_coupled(&mut state, t, &mut rng, true).unwrap();
        tally(&mut up, state.upper(), gen.floor());
        tally(&mut lo, state.lower(), gen.floor());
    }
    worst_z(&up, &exact_up, replicas).max(worst_z(&lo, &exact_lo, replicas))
}
