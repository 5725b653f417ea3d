use rand_chacha::ChaCha8Rng;

use super::{ExperimentConfig, HarnessError};
use crate::dynamics::{
    ballistic_window, bulk_rate, diffusive_window, experiment_id, normal_cdf, poisson_tail, run_replicas, Configuration,
    Dynamics, DynamicsError, Scaling, StepSampler, WindowPlan, WINDOW_MARGIN,
};
use crate::measures::MarginalFamily;
use crate::model::{ModelSpec, Occupancy};

/// Time change between the symmetric dynamics as simulated and the
/// `du/dt = (1/2) Laplacian d(u)` normalization of the limit profile.
pub const SYMMETRIC_TIME_FACTOR: f64 = 2.0;

/// Allowance for finite-size bias added to the DKW bound.
pub const FINITE_N_ALLOWANCE: f64 = 0.02;

/// Two-sided 95% Dvoretzky-Kiefer-Wolfowitz radius for `n` samples.
pub fn dkw_bound(n: u64) -> f64 {
    ((2.0f64 / 0.05).ln() / (2.0 * n as f64)).sqrt()
}

/// Model, marginals and rates shared by the replicas of one experiment.
pub struct Setup {
    pub model: ModelSpec,
    pub family: MarginalFamily,
    pub dynamics: Dynamics,
    pub sampler: StepSampler,
    pub r_max: f64,
}

impl Setup {
    pub fn new(model: ModelSpec, family: MarginalFamily, rho: f64, lambda: f64) -> Result<Self, HarnessError> {
        let sampler = StepSampler::new(&family, rho, lambda)?;
        let r_max = bulk_rate(&model.kernel, &[sampler.left(), sampler.right()]);
        let dynamics = Dynamics::for_model(&model);
        Ok(Self {
            model,
            family,
            dynamics,
            sampler,
            r_max,
        })
    }

    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self, HarnessError> {
        let model = cfg.model.build()?;
        let family = cfg.family.build(&model)?;
        Self::new(model, family, cfg.rho, cfg.lambda)
    }

    /// Same model and family at other densities.
    pub fn at(&self, rho: f64, lambda: f64) -> Result<Self, HarnessError> {
        Self::new(self.model.clone(), self.family.clone(), rho, lambda)
    }

    pub fn window(&self, t: f64, half_width: Option<i32>) -> WindowPlan {
        plan_window(self.model.kernel.is_symmetric(), self.r_max, t, half_width)
    }
}

/// Window for time `t`: the rule for the scaling, or a fixed half width with
/// the matching tail bound.
pub fn plan_window(symmetric: bool, r_max: f64, t: f64, half_width: Option<i32>) -> WindowPlan {
    let rule = if symmetric {
        diffusive_window(r_max, t)
    } else {
        ballistic_window(r_max, t)
    };
    let Some(w) = half_width else {
        return rule;
    };
    let reach = w - WINDOW_MARGIN;
    let tail_bound = match rule.scaling {
        Scaling::Ballistic => poisson_tail(r_max * t, reach),
        Scaling::Diffusive => {
            let sd = (2.0 * r_max * t).sqrt();
            if sd > 0.0 {
                (2.0 * (1.0 - normal_cdf(f64::from(reach) / sd))).min(1.0)
            } else {
                0.0
            }
        }
    };
    WindowPlan {
        half_width: w,
        tail_bound,
        ..rule
    }
}

/// Per-replica observation of the coupled system at the end time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoupledOutcome {
    pub q: i32,
    pub upper_at_q: Occupancy,
}

pub struct CoupledRun {
    pub outcomes: Vec<CoupledOutcome>,
    pub aborts: u64,
    pub events: u64,
}

/// Coupled replicas from the product measure with a lone second class
/// particle at the origin; truncated replicas are counted and dropped.
pub fn simulate_coupled(
    setup: &Setup,
    plan: &WindowPlan,
    replicas: u64,
    seed: u64,
    label: &str,
) -> Result<CoupledRun, HarnessError> {
    let t = plan.t;
    let results = run_replicas(replicas, seed, experiment_id(label), |_, rng: &mut ChaCha8Rng| {
        let mut state = setup.sampler.sample_coupled(plan.half_width, rng)?;
        match setup.dynamics.evolve_coupled(&mut state, t, rng, true) {
            Ok(stats) => {
                let q = state.track_q()?;
                let upper_at_q = state.upper().at(q);
                Ok(Some((CoupledOutcome { q, upper_at_q }, stats.events)))
            }
            Err(DynamicsError::Truncation { .. }) => Ok(None),
            Err(e) => Err(HarnessError::from(e)),
        }
    });
    let mut out = CoupledRun {
        outcomes: Vec::with_capacity(results.len()),
        aborts: 0,
        events: 0,
    };
    for r in results {
        match r? {
            Some((o, ev)) => {
                out.outcomes.push(o);
                out.events += ev;
            }
            None => out.aborts += 1,
        }
    }
    Ok(out)
}

/// Means and standard errors of vector observables over replicas.
#[derive(Clone, Debug)]
pub struct MeanVec {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub replicas: u64,
    pub aborts: u64,
}

/// Single-process replicas from the step product measure of `setup`;
/// `observe` maps the final configuration to a vector of observables.
pub fn simulate_single<F>(
    setup: &Setup,
    plan: &WindowPlan,
    replicas: u64,
    seed: u64,
    label: &str,
    observe: F,
) -> Result<MeanVec, HarnessError>
where
    F: Fn(&Configuration) -> Vec<f64> + Sync + Send,
{
    let t = plan.t;
    let results = run_replicas(replicas, seed, experiment_id(label), |_, rng: &mut ChaCha8Rng| {
        let mut cfg = setup.sampler.sample_single(plan.half_width, rng);
        match setup.dynamics.evolve_single(&mut cfg, t, rng) {
            Ok(_) => Ok(Some(observe(&cfg))),
            Err(DynamicsError::Truncation { .. }) => Ok(None),
            Err(e) => Err(HarnessError::from(e)),
        }
    });
    let mut sum: Vec<f64> = Vec::new();
    let mut sumsq: Vec<f64> = Vec::new();
    let (mut n, mut aborts) = (0u64, 0u64);
    for r in results {
        match r? {
            Some(v) => {
                if sum.is_empty() {
                    sum = vec![0.0; v.len()];
                    sumsq = vec![0.0; v.len()];
                }
                for (k, x) in v.iter().enumerate() {
                    sum[k] += x;
                    sumsq[k] += x * x;
                }
                n += 1;
            }
            None => aborts += 1,
        }
    }
    if n < 2 {
        return Err(HarnessError::Config(format!("{label}: fewer than two replicas survived truncation")));
    }
    let nf = n as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / nf).collect();
    let stderr = sumsq
        .iter()
        .zip(&mean)
        .map(|(s2, m)| ((s2 / nf - m * m).max(0.0) * nf / (nf - 1.0) / nf).sqrt())
        .collect();
    Ok(MeanVec {
        mean,
        stderr,
        replicas: n,
        aborts,
    })
}

/// Empirical `P(Q <= n)` for each `n` in `lo..=hi`, from sorted positions.
pub fn empirical_cdf(sorted: &[i32], lo: i32, hi: i32) -> Vec<(i32, f64)> {
    let k = sorted.len() as f64;
    (lo..=hi)
        .map(|n| (n, sorted.partition_point(|&q| q <= n) as f64 / k))
        .collect()
}
