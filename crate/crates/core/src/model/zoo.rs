//! Built-in models and their rate tables.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kernel::{Occupancy, OccupancyRange, RateKernel};
use super::ModelError;

/// Site function `f` of the misanthrope decomposition.
pub type SiteFn = Arc<dyn Fn(Occupancy) -> f64 + Send + Sync>;
/// Symmetric two-argument function (`s_p`, `s_q`).
pub type PairFn = Arc<dyn Fn(Occupancy, Occupancy) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    Asep,
    Tasep,
    KExclusion,
    TwoType,
    ZrConst,
    ZrLinear,
    BricklayersExp,
    SymExclusion,
    SymTwoType,
    SymZrConst,
    SymZrLinear,
}

impl ModelName {
    pub const ALL: [ModelName; 11] = [
        ModelName::Asep,
        ModelName::Tasep,
        ModelName::KExclusion,
        ModelName::TwoType,
        ModelName::ZrConst,
        ModelName::ZrLinear,
        ModelName::BricklayersExp,
        ModelName::SymExclusion,
        ModelName::SymTwoType,
        ModelName::SymZrConst,
        ModelName::SymZrLinear,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelName::Asep => "asep",
            ModelName::Tasep => "tasep",
            ModelName::KExclusion => "k_exclusion",
            ModelName::TwoType => "two_type",
            ModelName::ZrConst => "zr_const",
            ModelName::ZrLinear => "zr_linear",
            ModelName::BricklayersExp => "bricklayers_exp",
            ModelName::SymExclusion => "sym_exclusion",
            ModelName::SymTwoType => "sym_two_type",
            ModelName::SymZrConst => "sym_zr_const",
            ModelName::SymZrLinear => "sym_zr_linear",
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(
            self,
            ModelName::SymExclusion | ModelName::SymTwoType | ModelName::SymZrConst | ModelName::SymZrLinear
        )
    }

    /// Parameter names accepted by the factory, with `true` for required ones.
    fn parameter_names(&self) -> &'static [(&'static str, bool)] {
        match self {
            ModelName::Asep => &[("p", true)],
            ModelName::Tasep => &[],
            ModelName::KExclusion => &[("K", true), ("p", false)],
            ModelName::TwoType => &[("c", true)],
            ModelName::ZrConst | ModelName::ZrLinear => &[("p", false)],
            ModelName::BricklayersExp => &[("beta", true), ("p", false)],
            ModelName::SymExclusion | ModelName::SymZrConst | ModelName::SymZrLinear => &[],
            ModelName::SymTwoType => &[("c", true)],
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelName::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ModelError::UnknownModel(s.to_string()))
    }
}

/// Simulation bounds for models with an infinite state space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub floor: Occupancy,
    pub cap: Occupancy,
}

pub const ZERO_RANGE_DEFAULT_CAP: Occupancy = 160;
pub const BRICKLAYERS_DEFAULT_HALF_WIDTH: Occupancy = 25;

/// Cylinder function `g` for the gradient condition, evaluated on `width`
/// consecutive occupancies starting at the reference site.
#[derive(Clone)]
pub struct GradientFunction {
    pub width: usize,
    pub eval: Arc<dyn Fn(&[Occupancy]) -> f64 + Send + Sync>,
}

impl fmt::Debug for GradientFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradientFunction").field("width", &self.width).finish_non_exhaustive()
    }
}

impl GradientFunction {
    pub fn single_site<F>(g: F) -> Self
    where
        F: Fn(Occupancy) -> f64 + Send + Sync + 'static,
    {
        Self {
            width: 1,
            eval: Arc::new(move |w: &[Occupancy]| g(w[0])),
        }
    }

    pub fn eval(&self, window: &[Occupancy]) -> f64 {
        (self.eval)(window)
    }
}

/// `(f, s_p, s_q)` with `p(a,b) = s_p(a, b+1) f(a)` and `q(a,b) = s_q(a+1, b) f(b)`.
///
/// `s_p` and `s_q` must return zero for arguments outside the state space.
#[derive(Clone)]
pub struct MisanthropeTriple {
    pub f: SiteFn,
    pub s_p: PairFn,
    pub s_q: PairFn,
}

impl fmt::Debug for MisanthropeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MisanthropeTriple { .. }")
    }
}

/// A fully specified model: kernel, identity, parameters and optional structure.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub kernel: RateKernel,
    pub name: ModelName,
    pub parameters: BTreeMap<String, f64>,
    pub gradient_function: Option<GradientFunction>,
    pub misanthrope: Option<MisanthropeTriple>,
}

impl ModelSpec {
    pub fn range(&self) -> &OccupancyRange {
        self.kernel.range()
    }

    pub fn parameter(&self, key: &str) -> Option<f64> {
        self.parameters.get(key).copied()
    }
}

pub fn build_model(name: ModelName, parameters: &BTreeMap<String, f64>) -> Result<ModelSpec, ModelError> {
    build_model_with(name, parameters, None)
}

fn get_required(name: ModelName, params: &BTreeMap<String, f64>, key: &'static str) -> Result<f64, ModelError> {
    params
        .get(key)
        .copied()
        .ok_or(ModelError::MissingParameter { model: name, key })
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Zero function outside `[lo, hi]` (either side may be unbounded).
fn restrict(lo: Option<Occupancy>, hi: Option<Occupancy>, s: impl Fn(Occupancy, Occupancy) -> f64 + Send + Sync + 'static) -> PairFn {
    Arc::new(move |x, y| {
        let inside = |v: Occupancy| lo.map_or(true, |l| v >= l) && hi.map_or(true, |h| v <= h);
        if inside(x) && inside(y) {
            s(x, y)
        } else {
            0.0
        }
    })
}

/// Builds a model with explicit simulation bounds for infinite state spaces.
pub fn build_model_with(
    name: ModelName,
    parameters: &BTreeMap<String, f64>,
    truncation: Option<Truncation>,
) -> Result<ModelSpec, ModelError> {
    let allowed = name.parameter_names();
    for key in parameters.keys() {
        if !allowed.iter().any(|(k, _)| k == key) {
            return Err(ModelError::UnknownParameter {
                model: name,
                key: key.clone(),
            });
        }
    }
    for (key, required) in allowed {
        if *required {
            get_required(name, parameters, key)?;
        }
    }
    for (key, value) in parameters {
        if !value.is_finite() {
            return Err(ModelError::ParameterOutOfRange {
                model: name,
                key: key.clone(),
                value: *value,
                reason: "must be finite",
            });
        }
    }
    let out_of_range = |key: &str, value: f64, reason: &'static str| ModelError::ParameterOutOfRange {
        model: name,
        key: key.to_string(),
        value,
        reason,
    };
    let drift = |default: f64| -> Result<(f64, f64), ModelError> {
        let p = parameters.get("p").copied().unwrap_or(default);
        if !(0.0..=1.0).contains(&p) {
            return Err(out_of_range("p", p, "right jump weight must lie in [0, 1]"));
        }
        Ok((p, 1.0 - p))
    };
    if truncation.is_some() && matches!(name, ModelName::Asep | ModelName::Tasep | ModelName::KExclusion | ModelName::TwoType | ModelName::SymExclusion | ModelName::SymTwoType) {
        return Err(ModelError::InvalidRange(format!("{name} has a finite state space; truncation does not apply")));
    }

    let mut gradient_function = None;
    let (kernel, misanthrope) = match name {
        ModelName::Asep | ModelName::Tasep => {
            let (pb, qb) = if name == ModelName::Tasep { (1.0, 0.0) } else { drift(1.0)? };
            let range = OccupancyRange::bounded(0, 1)?;
            let kernel = RateKernel::new(
                range,
                move |a, b| pb * f64::from(a) * f64::from(1 - b),
                move |a, b| qb * f64::from(b) * f64::from(1 - a),
            )?;
            let triple = MisanthropeTriple {
                f: Arc::new(|x| f64::from(x)),
                s_p: restrict(Some(0), Some(1), move |x, y| if x == 1 && y == 1 { pb } else { 0.0 }),
                s_q: restrict(Some(0), Some(1), move |x, y| if x == 1 && y == 1 { qb } else { 0.0 }),
            };
            (kernel, Some(triple))
        }
        ModelName::KExclusion => {
            let k = get_required(name, parameters, "K")?;
            if k < 1.0 || k.fract() != 0.0 || k > 1000.0 {
                return Err(out_of_range("K", k, "must be a positive integer"));
            }
            let k = k as Occupancy;
            let (pb, qb) = drift(1.0)?;
            let range = OccupancyRange::bounded(0, k)?;
            let kernel = RateKernel::new(
                range,
                move |a, b| pb * indicator(a > 0 && b < k),
                move |a, b| qb * indicator(b > 0 && a < k),
            )?;
            (kernel, None)
        }
        ModelName::TwoType => {
            let c = get_required(name, parameters, "c")?;
            if !(c > 0.0 && c <= 0.5) {
                return Err(out_of_range("c", c, "attractive only for 0 < c <= 1/2"));
            }
            let range = OccupancyRange::bounded(-1, 1)?;
            let kernel = RateKernel::new(range, move |a, b| two_type_rate(c, a, b), |_, _| 0.0)?;
            let triple = MisanthropeTriple {
                f: Arc::new(move |x| match x {
                    0 => c,
                    -1 => 0.0,
                    _ => 1.0,
                }),
                s_p: restrict(Some(-1), Some(1), move |x, y| match (x.min(y), x.max(y)) {
                    (0, 0) => 1.0 / (2.0 * c),
                    (0, 1) => 1.0,
                    (1, 1) => 0.5,
                    _ => 0.0,
                }),
                s_q: Arc::new(|_, _| 0.0),
            };
            (kernel, Some(triple))
        }
        ModelName::ZrConst | ModelName::ZrLinear | ModelName::SymZrConst | ModelName::SymZrLinear => {
            let (pb, qb) = if name.is_symmetric() { (1.0, 1.0) } else { drift(1.0)? };
            let cap = match truncation {
                Some(t) => {
                    if t.floor != 0 {
                        return Err(ModelError::InvalidRange("zero-range floor must be 0".into()));
                    }
                    t.cap
                }
                None => ZERO_RANGE_DEFAULT_CAP,
            };
            let range = OccupancyRange::new(Some(0), None, 0, cap)?;
            let linear = matches!(name, ModelName::ZrLinear | ModelName::SymZrLinear);
            let f = move |x: Occupancy| {
                if x <= 0 {
                    0.0
                } else if linear {
                    f64::from(x)
                } else {
                    1.0
                }
            };
            let kernel = RateKernel::new(range, move |a, _| pb * f(a), move |_, b| qb * f(b))?;
            if name.is_symmetric() {
                gradient_function = Some(GradientFunction::single_site(f));
            }
            let triple = MisanthropeTriple {
                f: Arc::new(move |x| if x < 0 { 1.0 } else { f(x) }),
                s_p: restrict(Some(0), None, move |_, _| pb),
                s_q: restrict(Some(0), None, move |_, _| qb),
            };
            (kernel, Some(triple))
        }
        ModelName::BricklayersExp => {
            let beta = get_required(name, parameters, "beta")?;
            if beta <= 0.0 {
                return Err(out_of_range("beta", beta, "must be positive"));
            }
            let (pb, qb) = drift(1.0)?;
            let half = (f64::from(BRICKLAYERS_DEFAULT_HALF_WIDTH) / beta.sqrt()).ceil().max(f64::from(BRICKLAYERS_DEFAULT_HALF_WIDTH)) as Occupancy;
            let (floor, cap) = match truncation {
                Some(t) => (t.floor, t.cap),
                None => (-half, half),
            };
            let range = OccupancyRange::new(None, None, floor, cap)?;
            let f = move |x: Occupancy| (beta * (f64::from(x) - 0.5)).exp();
            let kernel = RateKernel::new(
                range,
                move |a, b| pb * (f(a) + f(-b)),
                move |a, b| qb * (f(-a) + f(b)),
            )?;
            let triple = MisanthropeTriple {
                f: Arc::new(f),
                s_p: Arc::new(move |x, y| pb * (1.0 + 1.0 / (f(x) * f(y)))),
                s_q: Arc::new(move |x, y| qb * (1.0 + 1.0 / (f(x) * f(y)))),
            };
            (kernel, Some(triple))
        }
        ModelName::SymExclusion => {
            let range = OccupancyRange::bounded(0, 1)?;
            let kernel = RateKernel::new(
                range,
                |a, b| f64::from(a) * f64::from(1 - b),
                |a, b| f64::from(b) * f64::from(1 - a),
            )?;
            gradient_function = Some(GradientFunction::single_site(f64::from));
            let s = restrict(Some(0), Some(1), |x, y| if x == 1 && y == 1 { 1.0 } else { 0.0 });
            let triple = MisanthropeTriple {
                f: Arc::new(|x| f64::from(x)),
                s_p: s.clone(),
                s_q: s,
            };
            (kernel, Some(triple))
        }
        ModelName::SymTwoType => {
            let c = get_required(name, parameters, "c")?;
            if !(c > 0.0 && c <= 1.0) {
                return Err(out_of_range("c", c, "must satisfy 0 < c <= 1"));
            }
            let range = OccupancyRange::bounded(-1, 1)?;
            let kernel = RateKernel::new(range, move |a, b| sym_two_type_rate(c, a, b), move |a, b| sym_two_type_rate(c, b, a))?;
            gradient_function = Some(GradientFunction::single_site(f64::from));
            let s = restrict(Some(-1), Some(1), move |x, y| match (x.min(y), x.max(y)) {
                (0, 0) => 2.0 / c,
                (0, 1) => 2.0,
                (1, 1) => 1.0,
                _ => 0.0,
            });
            let triple = MisanthropeTriple {
                f: Arc::new(move |x| match x {
                    0 => c / 2.0,
                    -1 => 0.0,
                    _ => 1.0,
                }),
                s_p: s.clone(),
                s_q: s,
            };
            (kernel, Some(triple))
        }
    };

    Ok(ModelSpec {
        kernel,
        name,
        parameters: parameters.clone(),
        gradient_function,
        misanthrope,
    })
}

fn two_type_rate(c: f64, a: Occupancy, b: Occupancy) -> f64 {
    match (a, b) {
        (0, 0) => c,
        (0, -1) | (1, 0) => 0.5,
        (1, -1) => 1.0,
        _ => 0.0,
    }
}

fn sym_two_type_rate(c: f64, a: Occupancy, b: Occupancy) -> f64 {
    match (a, b) {
        (0, 0) => c,
        (1, -1) => 2.0,
        (0, -1) | (1, 0) => 1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn two_type_rate_table() {
        let m = build_model(ModelName::TwoType, &params(&[("c", 0.25)])).unwrap();
        let k = &m.kernel;
        assert_eq!(k.p(0, 0), 0.25);
        assert_eq!(k.p(0, -1), 0.5);
        assert_eq!(k.p(1, 0), 0.5);
        assert_eq!(k.p(1, -1), 1.0);
        assert_eq!(k.p(-1, -1), 0.0);
        assert_eq!(k.p(1, 1), 0.0);
        assert!(k.q_vanishes());
    }

    #[test]
    fn tasep_and_sym_zr_tables() {
        let t = build_model(ModelName::Tasep, &BTreeMap::new()).unwrap();
        for a in 0..=1 {
            for b in 0..=1 {
                assert_eq!(t.kernel.p(a, b), f64::from(a * (1 - b)));
                assert_eq!(t.kernel.q(a, b), 0.0);
            }
        }
        let z = build_model(ModelName::SymZrConst, &BTreeMap::new()).unwrap();
        assert_eq!(z.kernel.p(3, 0), 1.0);
        assert_eq!(z.kernel.p(0, 5), 0.0);
        assert_eq!(z.kernel.q(0, 2), 1.0);
        assert_eq!(z.kernel.q(4, 0), 0.0);
        assert!(z.gradient_function.is_some());
        assert!(z.kernel.is_symmetric());
    }

    #[test]
    fn factory_errors() {
        assert!(matches!("nope".parse::<ModelName>(), Err(ModelError::UnknownModel(_))));
        assert!(matches!(
            build_model(ModelName::TwoType, &params(&[("c", 0.6)])),
            Err(ModelError::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            build_model(ModelName::TwoType, &BTreeMap::new()),
            Err(ModelError::MissingParameter { key: "c", .. })
        ));
        assert!(matches!(
            build_model(ModelName::BricklayersExp, &params(&[("beta", -1.0)])),
            Err(ModelError::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            build_model(ModelName::Tasep, &params(&[("c", 1.0)])),
            Err(ModelError::UnknownParameter { .. })
        ));
    }

    #[test]
    fn non_degeneracy_for_every_builtin() {
        for m in all_builtins() {
            m.kernel.check_non_degeneracy().unwrap_or_else(|e| panic!("{}: {e}", m.name));
        }
    }

    #[test]
    fn names_round_trip() {
        for n in ModelName::ALL {
            assert_eq!(n.as_str().parse::<ModelName>().unwrap(), n);
            let json = serde_json::to_string(&n).unwrap();
            assert_eq!(json, format!("\"{}\"", n.as_str()));
        }
    }

    pub(crate) fn all_builtins() -> Vec<ModelSpec> {
        vec![
            build_model(ModelName::Asep, &params(&[("p", 0.75)])).unwrap(),
            build_model(ModelName::Tasep, &BTreeMap::new()).unwrap(),
            build_model(ModelName::KExclusion, &params(&[("K", 3.0), ("p", 0.8)])).unwrap(),
            build_model(ModelName::TwoType, &params(&[("c", 0.25)])).unwrap(),
            build_model(ModelName::TwoType, &params(&[("c", 1.0 / 324.0)])).unwrap(),
            build_model(ModelName::ZrConst, &BTreeMap::new()).unwrap(),
            build_model(ModelName::ZrLinear, &params(&[("p", 0.7)])).unwrap(),
            build_model(ModelName::BricklayersExp, &params(&[("beta", 1.0)])).unwrap(),
            build_model(ModelName::SymExclusion, &BTreeMap::new()).unwrap(),
            build_model(ModelName::SymTwoType, &params(&[("c", 0.5)])).unwrap(),
            build_model(ModelName::SymZrConst, &BTreeMap::new()).unwrap(),
            build_model(ModelName::SymZrLinear, &BTreeMap::new()).unwrap(),
        ]
    }
}
