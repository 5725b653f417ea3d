use serde::Serialize;

use super::HydroError;
use crate::measures::{MarginalFamily, Pmf};
use crate::model::{ModelError, ModelSpec, Occupancy, RateTable};

pub const FLUX_GRID_POINTS: usize = 2001;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub model: String,
    pub family: String,
    /// False when the family is not the model's stationary family; the
    /// tabulated values are then formal.
    pub stationary: bool,
}

/// A function of the density tabulated on a strictly increasing grid.
#[derive(Clone, Debug, Serialize)]
pub struct FluxTable {
    grid: Vec<f64>,
    values: Vec<f64>,
    provenance: Provenance,
}

fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let n = points - 1;
    (0..=n)
        .map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 })
        .collect()
}

/// Whether `family` agrees with the model's product stationary family.
pub fn is_stationary_family(model: &ModelSpec, family: &MarginalFamily) -> bool {
    let Ok(own) = MarginalFamily::from_model(model) else {
        return false;
    };
    let (lo, hi) = family.density_domain();
    let (olo, ohi) = own.density_domain();
    let (lo, hi) = (lo.max(olo), hi.min(ohi));
    if !(hi > lo) {
        return false;
    }
    [0.25, 0.5, 0.75].iter().all(|s| {
        let rho = lo + s * (hi - lo);
        match (family.pmf(rho), own.pmf(rho)) {
            (Ok(a), Ok(b)) => {
                let xs = a.floor().min(b.floor())..=a.cap().max(b.cap());
                xs.into_iter().all(|x| (a.prob(x) - b.prob(x)).abs() < 1e-9)
            }
            _ => false,
        }
    })
}

fn charged(pmf: &Pmf, table: &RateTable, rho: f64) -> Result<Vec<(Occupancy, f64)>, HydroError> {
    let pts: Vec<_> = pmf.iter().filter(|&(_, w)| w > 0.0).collect();
    if pts.iter().any(|&(x, _)| x < table.floor() || x > table.cap()) {
        return Err(HydroError::OutsideModelRange(rho));
    }
    Ok(pts)
}

fn flux_from_pmf(table: &RateTable, pmf: &Pmf, rho: f64) -> Result<f64, HydroError> {
    let pts = charged(pmf, table, rho)?;
    let mut g = 0.0;
    for &(a, wa) in &pts {
        let mut row = 0.0;
        for &(b, wb) in &pts {
            let [p, q] = table.pq(a, b);
            row += (p - q) * wb;
        }
        g += wa * row;
    }
    Ok(g)
}

fn diffusivity_from_pmf(model: &ModelSpec, pmf: &Pmf, rho: f64) -> Result<f64, HydroError> {
    let g = model.gradient_function.as_ref().ok_or(ModelError::NoGradientFunction)?;
    let table = RateTable::from_kernel(&model.kernel);
    let pts = charged(pmf, &table, rho)?;
    let mut idx = vec![0usize; g.width];
    let mut window = vec![0; g.width];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for (k, &i) in idx.iter().enumerate() {
            window[k] = pts[i].0;
            w *= pts[i].1;
        }
        total += w * g.eval(&window);
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < pts.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            return Ok(total);
        }
    }
}

/// Mean signed jump rate over a bond under the product marginal at `rho`.
pub fn flux_g(model: &ModelSpec, family: &MarginalFamily, rho: f64) -> Result<f64, HydroError> {
    let pmf = family.pmf(rho)?;
    flux_from_pmf(&RateTable::from_kernel(&model.kernel), &pmf, rho)
}

/// Expectation of the gradient function under the product marginal at `rho`.
pub fn diffusivity_d(model: &ModelSpec, family: &MarginalFamily, rho: f64) -> Result<f64, HydroError> {
    let pmf = family.pmf(rho)?;
    diffusivity_from_pmf(model, &pmf, rho)
}

impl FluxTable {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, provenance: Provenance) -> Result<Self, HydroError> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(HydroError::GridTooCoarse(format!(
                "{} grid points for {} values",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = (1..grid.len()).find(|&i| !(grid[i] > grid[i - 1])) {
            return Err(HydroError::GridNotIncreasing(i));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(HydroError::NonFinite(grid[i]));
        }
        Ok(Self { grid, values, provenance })
    }

    /// Tabulates `f` on `points` uniform points of `[lo, hi]`.
    pub fn tabulate<F>(lo: f64, hi: f64, points: usize, provenance: Provenance, mut f: F) -> Result<Self, HydroError>
    where
        F: FnMut(f64) -> Result<f64, HydroError>,
    {
        if !(hi > lo) || points < 2 {
            return Err(HydroError::GridTooCoarse(format!("[{lo}, {hi}] with {points} points")));
        }
        let grid = uniform_grid(lo, hi, points);
        let values = grid.iter().map(|&u| f(u)).collect::<Result<Vec<_>, _>>()?;
        Self::new(grid, values, provenance)
    }

    /// Hydrodynamic flux on [`FLUX_GRID_POINTS`] points of `[lo, hi]`.
    pub fn flux(model: &ModelSpec, family: &MarginalFamily, lo: f64, hi: f64) -> Result<Self, HydroError> {
        let table = RateTable::from_kernel(&model.kernel);
        let provenance = Provenance {
            model: model.name.to_string(),
            family: family.label().to_string(),
            stationary: is_stationary_family(model, family),
        };
        Self::tabulate(lo, hi, FLUX_GRID_POINTS, provenance, |rho| {
            flux_from_pmf(&table, &family.pmf(rho)?, rho)
        })
    }

    /// Diffusivity on [`FLUX_GRID_POINTS`] points of `[lo, hi]`.
    pub fn diffusivity(model: &ModelSpec, family: &MarginalFamily, lo: f64, hi: f64) -> Result<Self, HydroError> {
        if model.gradient_function.is_none() {
            return Err(ModelError::NoGradientFunction.into());
        }
        let provenance = Provenance {
            model: model.name.to_string(),
            family: family.label().to_string(),
            stationary: is_stationary_family(model, family),
        };
        Self::tabulate(lo, hi, FLUX_GRID_POINTS, provenance, |rho| {
            diffusivity_from_pmf(model, &family.pmf(rho)?, rho)
        })
    }

    /// Closed-form function on [`FLUX_GRID_POINTS`] points, for oracles.
    pub fn from_fn(label: &str, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> Result<Self, HydroError> {
        let provenance = Provenance {
            model: label.to_string(),
            family: "closed_form".to_string(),
            stationary: true,
        };
        Self::tabulate(lo, hi, FLUX_GRID_POINTS, provenance, |u| Ok(f(u)))
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn lo(&self) -> f64 {
        self.grid[0]
    }

    pub fn hi(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub(crate) fn check_inside(&self, u: f64) -> Result<(), HydroError> {
        let slack = 1e-12 * (self.hi() - self.lo());
        if u < self.lo() - slack || u > self.hi() + slack || u.is_nan() {
            return Err(HydroError::OutsideTable {
                value: u,
                lo: self.lo(),
                hi: self.hi(),
            });
        }
        Ok(())
    }

    /// Index `i` with `grid[i] <= u <= grid[i + 1]`, clamped to the table.
    #[inline]
    pub(crate) fn cell(&self, u: f64) -> usize {
        let i = self.grid.partition_point(|&g| g <= u);
        i.clamp(1, self.grid.len() - 1) - 1
    }

    /// Piecewise-linear interpolation, clamped at the ends.
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        let i = self.cell(u);
        let (u0, u1) = (self.grid[i], self.grid[i + 1]);
        let s = ((u - u0) / (u1 - u0)).clamp(0.0, 1.0);
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }

    /// Largest absolute slope between neighbouring grid points.
    pub fn max_abs_slope(&self) -> f64 {
        self.slopes().map(f64::abs).fold(0.0, f64::max)
    }

    pub(crate) fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(g, v)| (v[1] - v[0]) / (g[1] - g[0]))
    }
}
