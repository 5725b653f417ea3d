use rand::Rng;

use super::config::{Configuration, CoupledState};
use crate::measures::{hat_nu, MarginalFamily, MeasureError, PairMarginal, Pmf};

/// Product step initial conditions at densities `rho` (left) and `lambda` (right).
#[derive(Clone, Debug)]
pub struct StepSampler {
    rho: f64,
    lambda: f64,
    left: Pmf,
    right: Pmf,
    hat: Option<PairMarginal>,
}

impl StepSampler {
    pub fn new(family: &MarginalFamily, rho: f64, lambda: f64) -> Result<Self, MeasureError> {
        if rho < lambda {
            return Err(MeasureError::DensityOrder { rho, lambda });
        }
        let left = family.pmf(rho)?;
        let right = family.pmf(lambda)?;
        let hat = if rho > lambda { Some(hat_nu(family, rho, lambda)?) } else { None };
        Ok(Self {
            rho,
            lambda,
            left,
            right,
            hat,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn left(&self) -> &Pmf {
        &self.left
    }

    pub fn right(&self) -> &Pmf {
        &self.right
    }

    pub fn hat(&self) -> Option<&PairMarginal> {
        self.hat.as_ref()
    }

    /// Sites `<= 0` from `nu^rho`, sites `>= 1` from `nu^lambda`.
    pub fn sample_single<R: Rng + ?Sized>(&self, half_width: i32, rng: &mut R) -> Configuration {
        Configuration::from_fn(half_width, |i| if i <= 0 { self.left.sample(rng) } else { self.right.sample(rng) })
    }

    /// Diagonal pairs off the origin and a hat pair at the origin.
    pub fn sample_coupled<R: Rng + ?Sized>(&self, half_width: i32, rng: &mut R) -> Result<CoupledState, MeasureError> {
        let hat = self.hat.as_ref().ok_or(MeasureError::DensityOrder {
            rho: self.rho,
            lambda: self.lambda,
        })?;
        let n = (2 * half_width + 1) as usize;
        let mut up = Vec::with_capacity(n);
        let mut lo = Vec::with_capacity(n);
        for i in -half_width..=half_width {
            let (x, y) = match i.cmp(&0) {
                std::cmp::Ordering::Less => {
                    let x = self.left.sample(rng);
                    (x, x)
                }
                std::cmp::Ordering::Equal => hat.sample(rng),
                std::cmp::Ordering::Greater => {
                    let y = self.right.sample(rng);
                    (y, y)
                }
            };
            up.push(x);
            lo.push(y);
        }
        Ok(CoupledState::new(
            Configuration::new(half_width, up),
            Configuration::new(half_width, lo),
        ))
    }
}
