use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    Normal,
    Wilson,
}

/// Monte Carlo estimate with a 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub replicas: u64,
    pub lo: f64,
    pub hi: f64,
    pub interval: IntervalKind,
    pub truncation_aborts: u64,
}

pub const Z95: f64 = 1.959_963_984_540_054;

impl Estimate {
    /// Sample mean with a normal interval.
    pub fn mean(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n >= 2, "need at least two replicas");
        let m = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        Self {
            value: m,
            stderr: se,
            replicas: n as u64,
            lo: m - Z95 * se,
            hi: m + Z95 * se,
            interval: IntervalKind::Normal,
            truncation_aborts: 0,
        }
    }

    /// Proportion with a Wilson score interval.
    pub fn proportion(successes: u64, n: u64) -> Self {
        assert!(n >= 2, "need at least two replicas");
        let nf = n as f64;
        let p = successes as f64 / nf;
        let se = (p * (1.0 - p) / nf).sqrt();
        let (lo, hi) = wilson(successes, n, Z95);
        Self {
            value: p,
            stderr: se,
            replicas: n,
            lo,
            hi,
            interval: IntervalKind::Wilson,
            truncation_aborts: 0,
        }
    }

    pub fn with_aborts(mut self, aborts: u64) -> Self {
        self.truncation_aborts = aborts;
        self
    }

    /// Fraction of attempted replicas that hit the truncation bounds.
    pub fn abort_fraction(&self) -> f64 {
        let attempted = self.replicas + self.truncation_aborts;
        if attempted == 0 {
            0.0
        } else {
            self.truncation_aborts as f64 / attempted as f64
        }
    }
}

/// Wilson score interval at critical value `z`.
pub fn wilson(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // Exact endpoints at 0 and n.
    let lo = if successes == 0 { 0.0 } else { (centre - half).clamp(0.0, p) };
    let hi = if successes == n { 1.0 } else { (centre + half).clamp(p, 1.0) };
    (lo, hi)
}

/// Two-sided z-score of `a - b` with independent errors; zero when both are exact and equal.
pub fn z_score(a: f64, se_a: f64, b: f64, se_b: f64) -> f64 {
    let se = (se_a * se_a + se_b * se_b).sqrt();
    let d = a - b;
    if se > 0.0 {
        d / se
    } else if d.abs() <= 1e-12 {
        0.0
    } else {
        d.signum() * f64::INFINITY
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}
