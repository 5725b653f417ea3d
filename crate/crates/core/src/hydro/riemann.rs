use serde::Serialize;

use super::{FluxTable, HydroError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// `u(x, t) = v(x / t)`.
    Hyperbolic,
    /// `u(x, t) = v(x / sqrt(t))`.
    Parabolic,
}

/// Jump of the profile at `xi` from `u_left` down to `u_right`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Shock {
    pub xi: f64,
    pub u_left: f64,
    pub u_right: f64,
}

impl Shock {
    pub fn gap(&self) -> f64 {
        self.u_left - self.u_right
    }
}

/// Monotone non-increasing self-similar profile from `rho` down to `lambda`.
///
/// Between knots the profile is linear; knots sharing a `xi` encode a jump,
/// which is also listed in `shocks`.
#[derive(Clone, Debug, Serialize)]
pub struct SimilarityProfile {
    kind: ProfileKind,
    rho: f64,
    lambda: f64,
    knots: Vec<(f64, f64)>,
    shocks: Vec<Shock>,
}

/// Point mass of the limiting law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub x: f64,
    pub mass: f64,
    pub cdf_below: f64,
    pub cdf_above: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum LimitCdf {
    Value(f64),
    Atom(Atom),
}

impl LimitCdf {
    /// The value, or the right limit at an atom.
    pub fn right_value(&self) -> f64 {
        match self {
            LimitCdf::Value(v) => *v,
            LimitCdf::Atom(a) => a.cdf_above,
        }
    }
}

const SHOCK_TOL: f64 = 1e-12;

impl SimilarityProfile {
    pub fn new(
        kind: ProfileKind,
        rho: f64,
        lambda: f64,
        knots: Vec<(f64, f64)>,
        shocks: Vec<Shock>,
    ) -> Result<Self, HydroError> {
        if !(rho >= lambda) {
            return Err(HydroError::DensityOrder { rho, lambda });
        }
        if knots.is_empty() {
            return Err(HydroError::GridTooCoarse("profile without knots".into()));
        }
        let slack = 1e-12 * (1.0 + rho.abs() + lambda.abs());
        for w in knots.windows(2) {
            if w[1].0 < w[0].0 || w[1].1 > w[0].1 + slack {
                return Err(HydroError::GridTooCoarse(format!(
                    "profile not monotone between {:?} and {:?}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self {
            kind,
            rho,
            lambda,
            knots,
            shocks,
        })
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn shocks(&self) -> &[Shock] {
        &self.shocks
    }

    /// `xi` range outside which the profile is constant.
    pub fn support(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    /// Similarity variable of `(x, t)`.
    pub fn xi(&self, x: f64, t: f64) -> f64 {
        match self.kind {
            ProfileKind::Hyperbolic => x / t,
            ProfileKind::Parabolic => x / t.sqrt(),
        }
    }

    /// Right-continuous profile value `v(xi)`.
    pub fn u(&self, xi: f64) -> f64 {
        let k = &self.knots;
        let j = k.partition_point(|&(x, _)| x <= xi);
        if j == 0 {
            return self.rho.max(k[0].1);
        }
        if j == k.len() {
            return self.lambda.min(k[j - 1].1);
        }
        let ((x0, u0), (x1, u1)) = (k[j - 1], k[j]);
        u0 + (xi - x0) / (x1 - x0) * (u1 - u0)
    }

    /// Right-continuous limiting distribution function in the similarity variable.
    pub fn cdf(&self, xi: f64) -> f64 {
        if self.rho == self.lambda {
            return if xi >= 0.0 { 1.0 } else { 0.0 };
        }
        ((self.rho - self.u(xi)) / (self.rho - self.lambda)).clamp(0.0, 1.0)
    }

    pub fn shock_at(&self, xi: f64) -> Option<&Shock> {
        self.shocks
            .iter()
            .find(|s| (s.xi - xi).abs() <= SHOCK_TOL * (1.0 + xi.abs()))
    }

    /// Atoms of the limiting law in the similarity variable.
    pub fn atoms(&self) -> Vec<Atom> {
        let span = self.rho - self.lambda;
        self.shocks
            .iter()
            .map(|s| Atom {
                x: s.xi,
                mass: s.gap() / span,
                cdf_below: (self.rho - s.u_left) / span,
                cdf_above: (self.rho - s.u_right) / span,
            })
            .collect()
    }

    /// Samples `(xi, u, is_shock)` on `points` uniform points of `[lo, hi]`,
    /// plus both sides of every shock inside.
    pub fn sample(&self, lo: f64, hi: f64, points: usize) -> Vec<(f64, f64, bool)> {
        let mut out: Vec<(f64, f64, bool)> = (0..points)
            .map(|i| {
                let xi = if points == 1 { lo } else { lo + (hi - lo) * i as f64 / (points - 1) as f64 };
                (xi, self.u(xi), self.shock_at(xi).is_some())
            })
            .collect();
        for s in &self.shocks {
            if s.xi >= lo && s.xi <= hi {
                out.push((s.xi, s.u_left, true));
                out.push((s.xi, s.u_right, true));
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        out.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        out
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Entropy solution of the Riemann problem with `rho` on the left and
/// `lambda < rho` on the right, built from the upper concave envelope.
pub fn riemann_solve(flux: &FluxTable, rho: f64, lambda: f64) -> Result<SimilarityProfile, HydroError> {
    if !(rho > lambda) {
        return Err(HydroError::DensityOrder { rho, lambda });
    }
    flux.check_inside(lambda)?;
    flux.check_inside(rho)?;
    let mut pts = vec![(lambda, flux.eval(lambda))];
    pts.extend(
        flux.grid()
            .iter()
            .zip(flux.values())
            .filter(|(&u, _)| u > lambda && u < rho)
            .map(|(&u, &g)| (u, g)),
    );
    pts.push((rho, flux.eval(rho)));
    if pts.len() < 3 {
        return Err(HydroError::GridTooCoarse(format!(
            "no grid point strictly between {lambda} and {rho}"
        )));
    }

    // upper hull, keeping near-collinear points
    let scale = pts.iter().map(|p| p.1.abs()).fold(1.0, f64::max) * (rho - lambda);
    let eps = 1e-14 * scale;
    let mut hull: Vec<usize> = Vec::with_capacity(pts.len());
    for i in 0..pts.len() {
        while hull.len() >= 2 && cross(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[i]) > eps {
            hull.pop();
        }
        hull.push(i);
    }

    // merge segments of equal slope
    let slope = |a: usize, b: usize| (pts[b].1 - pts[a].1) / (pts[b].0 - pts[a].0);
    let mut verts = vec![hull[0]];
    for &v in &hull[1..] {
        if verts.len() >= 2 {
            let (a, b) = (verts[verts.len() - 2], verts[verts.len() - 1]);
            let (s0, s1) = (slope(a, b), slope(b, v));
            if (s0 - s1).abs() <= 1e-9 * (1.0 + s0.abs()) {
                verts.pop();
            }
        }
        verts.push(v);
    }

    struct Seg {
        slope: f64,
        lo: usize,
        hi: usize,
        shock: bool,
    }
    let segs: Vec<Seg> = verts
        .windows(2)
        .map(|w| Seg {
            slope: slope(w[0], w[1]),
            lo: w[0],
            hi: w[1],
            shock: w[1] - w[0] >= 2,
        })
        .collect();

    // derivative estimate at a vertex from neighbouring fan cells
    let fan_xi = |j: usize, at_hi: bool| -> f64 {
        let s = segs[j].slope;
        let nb = if at_hi { j.checked_add(1).filter(|&k| k < segs.len()) } else { j.checked_sub(1) };
        match nb {
            Some(k) if !segs[k].shock => 0.5 * (s + segs[k].slope),
            _ => {
                let other = if at_hi { j.checked_sub(1) } else { Some(j + 1).filter(|&k| k < segs.len()) };
                match other {
                    Some(k) if !segs[k].shock => s + 0.5 * (s - segs[k].slope),
                    _ => s,
                }
            }
        }
    };

    // walk from rho (high u, small slope) down to lambda
    let mut knots: Vec<(f64, f64)> = Vec::new();
    let mut shocks = Vec::new();
    for j in (0..segs.len()).rev() {
        let s = &segs[j];
        let (uh, ul) = (pts[s.hi].0, pts[s.lo].0);
        if s.shock {
            knots.push((s.slope, uh));
            knots.push((s.slope, ul));
            shocks.push(Shock {
                xi: s.slope,
                u_left: uh,
                u_right: ul,
            });
        } else {
            if j + 1 == segs.len() || segs[j + 1].shock {
                knots.push((fan_xi(j, true), uh));
            }
            knots.push((fan_xi(j, false), ul));
        }
    }
    for i in 1..knots.len() {
        if knots[i].0 < knots[i - 1].0 {
            knots[i].0 = knots[i - 1].0;
        }
    }
    SimilarityProfile::new(ProfileKind::Hyperbolic, rho, lambda, knots, shocks)
}

/// Limiting `P(Q(t) <= x)` from the profile, or the atom descriptor when `x`
/// sits on a shock.
pub fn scp_limit_cdf(profile: &SimilarityProfile, x: f64, t: f64) -> Result<LimitCdf, HydroError> {
    if !(t > 0.0) {
        return Err(HydroError::NonPositiveTime(t));
    }
    let xi = profile.xi(x, t);
    if let Some(s) = profile.shock_at(xi) {
        let span = profile.rho - profile.lambda;
        let scale = match profile.kind {
            ProfileKind::Hyperbolic => t,
            ProfileKind::Parabolic => t.sqrt(),
        };
        return Ok(LimitCdf::Atom(Atom {
            x: s.xi * scale,
            mass: s.gap() / span,
            cdf_below: (profile.rho - s.u_left) / span,
            cdf_above: (profile.rho - s.u_right) / span,
        }));
    }
    Ok(LimitCdf::Value(profile.cdf(xi)))
}
