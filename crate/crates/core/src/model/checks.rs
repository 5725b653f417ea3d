use super::kernel::{Occupancy, RateKernel};
use super::zoo::{MisanthropeTriple, ModelSpec};
use super::ModelError;

const ALGEBRAIC_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateSide {
    P,
    Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    NonDecreasingInFirst,
    NonIncreasingInSecond,
    NonIncreasingInFirst,
    NonDecreasingInSecond,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AttractivenessVerdict {
    Pass,
    Counterexample {
        rate: RateSide,
        rule: Monotonicity,
        from: (Occupancy, Occupancy),
        to: (Occupancy, Occupancy),
        value_from: f64,
        value_to: f64,
    },
}

impl AttractivenessVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, AttractivenessVerdict::Pass)
    }
}

/// Exhaustive monotonicity scan over the truncated support.
///
/// Rules are checked in the order p/first, p/second, q/first, q/second, each
/// over pairs in lexicographic order; the first failure is returned.
pub fn check_attractiveness(kernel: &RateKernel) -> AttractivenessVerdict {
    let r = kernel.range();
    let (lo, hi) = (r.sim_floor, r.sim_cap);
    let rules = [
        (RateSide::P, Monotonicity::NonDecreasingInFirst),
        (RateSide::P, Monotonicity::NonIncreasingInSecond),
        (RateSide::Q, Monotonicity::NonIncreasingInFirst),
        (RateSide::Q, Monotonicity::NonDecreasingInSecond),
    ];
    for (side, rule) in rules {
        let rate = |a, b| match side {
            RateSide::P => kernel.p(a, b),
            RateSide::Q => kernel.q(a, b),
        };
        for a in lo..=hi {
            for b in lo..=hi {
                let to = match rule {
                    Monotonicity::NonDecreasingInFirst | Monotonicity::NonIncreasingInFirst => (a + 1, b),
                    _ => (a, b + 1),
                };
                if to.0 > hi || to.1 > hi {
                    continue;
                }
                let (v0, v1) = (rate(a, b), rate(to.0, to.1));
                let ok = match rule {
                    Monotonicity::NonDecreasingInFirst | Monotonicity::NonDecreasingInSecond => v0 <= v1,
                    Monotonicity::NonIncreasingInFirst | Monotonicity::NonIncreasingInSecond => v0 >= v1,
                };
                if !ok {
                    return AttractivenessVerdict::Counterexample {
                        rate: side,
                        rule,
                        from: (a, b),
                        to,
                        value_from: v0,
                        value_to: v1,
                    };
                }
            }
        }
    }
    AttractivenessVerdict::Pass
}

#[derive(Clone, Debug, PartialEq)]
pub enum MisanthropeVerdict {
    Pass,
    SymmetryViolated {
        rate: RateSide,
        x: Occupancy,
        y: Occupancy,
    },
    DecompositionViolated {
        rate: RateSide,
        a: Occupancy,
        b: Occupancy,
        rate_value: f64,
        product: f64,
    },
    TripleIdentityViolated {
        triple: (Occupancy, Occupancy, Occupancy),
        lhs: f64,
        rhs: f64,
    },
}

impl MisanthropeVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, MisanthropeVerdict::Pass)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= ALGEBRAIC_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Checks the product decomposition and the three-site identity of a
/// misanthrope triple over the truncated support.
pub fn check_misanthrope(kernel: &RateKernel, triple: &MisanthropeTriple) -> MisanthropeVerdict {
    let r = kernel.range();
    let (lo, hi) = (r.sim_floor, r.sim_cap);
    let (f, sp, sq) = (&triple.f, &triple.s_p, &triple.s_q);

    for x in lo..=hi {
        for y in lo..=hi {
            if !close(sp(x, y), sp(y, x)) {
                return MisanthropeVerdict::SymmetryViolated { rate: RateSide::P, x, y };
            }
            if !close(sq(x, y), sq(y, x)) {
                return MisanthropeVerdict::SymmetryViolated { rate: RateSide::Q, x, y };
            }
        }
    }
    for a in lo..=hi {
        for b in lo..=hi {
            let prod = sp(a, b + 1) * f(a);
            if !close(kernel.p(a, b), prod) {
                return MisanthropeVerdict::DecompositionViolated {
                    rate: RateSide::P,
                    a,
                    b,
                    rate_value: kernel.p(a, b),
                    product: prod,
                };
            }
            let prod = sq(a + 1, b) * f(b);
            if !close(kernel.q(a, b), prod) {
                return MisanthropeVerdict::DecompositionViolated {
                    rate: RateSide::Q,
                    a,
                    b,
                    rate_value: kernel.q(a, b),
                    product: prod,
                };
            }
        }
    }
    let w = r.len();
    let mut s = vec![0.0; w * w];
    for a in lo..=hi {
        for b in lo..=hi {
            s[r.index(a) * w + r.index(b)] = kernel.p(a, b) + kernel.q(a, b);
        }
    }
    let pq = |a: Occupancy, b: Occupancy| s[r.index(a) * w + r.index(b)];
    for x in lo..=hi {
        for y in lo..=hi {
            for z in lo..=hi {
                let lhs = pq(x, y) + pq(y, z) + pq(z, x);
                let rhs = pq(x, z) + pq(z, y) + pq(y, x);
                if !close(lhs, rhs) {
                    return MisanthropeVerdict::TripleIdentityViolated {
                        triple: (x, y, z),
                        lhs,
                        rhs,
                    };
                }
            }
        }
    }
    MisanthropeVerdict::Pass
}

#[derive(Clone, Debug, PartialEq)]
pub enum GradientVerdict {
    Pass,
    Violated {
        window: Vec<Occupancy>,
        lhs: f64,
        rhs: f64,
    },
}

impl GradientVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, GradientVerdict::Pass)
    }
}

/// Scans all windows of `width + 1` consecutive occupancies, which is every
/// configuration the gradient identity at one bond can see.
pub fn check_gradient(model: &ModelSpec) -> Result<GradientVerdict, ModelError> {
    let kernel = &model.kernel;
    if !kernel.is_symmetric() {
        return Err(ModelError::NotSymmetric);
    }
    let g = model.gradient_function.as_ref().ok_or(ModelError::NoGradientFunction)?;
    let r = kernel.range();
    let n = g.width + 1;
    let mut window = vec![r.sim_floor; n];
    loop {
        let lhs = kernel.p(window[0], window[1]) - kernel.p(window[1], window[0]);
        let rhs = g.eval(&window[..g.width]) - g.eval(&window[1..]);
        if !close(lhs, rhs) {
            return Ok(GradientVerdict::Violated { window, lhs, rhs });
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(GradientVerdict::Pass);
            }
            i -= 1;
            if window[i] < r.sim_cap {
                window[i] += 1;
                break;
            }
            window[i] = r.sim_floor;
        }
    }
}
