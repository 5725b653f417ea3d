use std::collections::BTreeMap;

use scpkit::hydro::*;
use scpkit::measures::MarginalFamily;
use scpkit::model::{build_model, ModelName, ModelSpec};

fn model(name: ModelName, kv: &[(&str, f64)]) -> ModelSpec {
    let p: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    build_model(name, &p).unwrap()
}

fn flux(m: &ModelSpec, lo: f64, hi: f64) -> FluxTable {
    FluxTable::flux(m, &MarginalFamily::from_model(m).unwrap(), lo, hi).unwrap()
}

fn v_max(c: f64) -> f64 {
    0.5 * ((1.0 - 16.0 * c) / (1.0 - 4.0 * c)).sqrt()
}

#[test]
fn two_type_non_convex_profile_has_central_shock() {
    let c = 1.0 / 324.0;
    let g = flux(&model(ModelName::TwoType, &[("c", c)]), -1.0, 1.0);
    let p = riemann_solve(&g, 1.0, -1.0).unwrap();
    assert_eq!(p.shocks().len(), 1);
    let s = p.shocks()[0];
    assert!(s.xi.abs() < 1e-9, "shock at {}", s.xi);
    let atoms = p.atoms();
    assert!((atoms[0].mass - v_max(c)).abs() < 2e-3, "{} vs {}", atoms[0].mass, v_max(c));
    assert!((v_max(c) - 0.4905).abs() < 1e-4);
    match scp_limit_cdf(&p, 0.0, 1.0).unwrap() {
        LimitCdf::Atom(a) => assert!((a.cdf_below + a.cdf_above - 1.0).abs() < 1e-9),
        other => panic!("expected atom, got {other:?}"),
    }
}

#[test]
fn two_type_concave_regime_has_no_shock() {
    let g = flux(&model(ModelName::TwoType, &[("c", 1.0 / 16.0)]), -1.0, 1.0);
    let p = riemann_solve(&g, 1.0, -1.0).unwrap();
    assert!(p.shocks().iter().all(|s| s.gap() < 1e-2), "{:?}", p.shocks());
}

#[test]
fn envelope_dominates_flux() {
    let g = flux(&model(ModelName::TwoType, &[("c", 1.0 / 324.0)]), -1.0, 1.0);
    let p = riemann_solve(&g, 1.0, -1.0).unwrap();
    // limiting law is a probability distribution
    let mut last = 0.0;
    for i in 0..=400 {
        let xi = -1.0 + i as f64 / 200.0;
        let f = p.cdf(xi);
        assert!((0.0..=1.0).contains(&f) && f >= last - 1e-12);
        last = f;
    }
    assert_eq!(p.cdf(-2.0), 0.0);
    assert_eq!(p.cdf(2.0), 1.0);
}

#[test]
fn godunov_agrees_with_envelope() {
    let cases = [
        (model(ModelName::Tasep, &[]), 1.0, 0.0),
        (model(ModelName::ZrConst, &[]), 1.0, 0.0),
        (model(ModelName::TwoType, &[("c", 1.0 / 16.0)]), 1.0, -1.0),
        (model(ModelName::TwoType, &[("c", 1.0 / 324.0)]), 1.0, -1.0),
    ];
    for (m, rho, lambda) in &cases {
        let g = flux(m, *lambda, *rho);
        let p = riemann_solve(&g, *rho, *lambda).unwrap();
        let run = godunov_oracle(&g, *rho, *lambda, 1.0, 1e-3).unwrap();
        let l1 = run.l1_distance(&p);
        assert!(l1 <= 0.02, "{}: L1 = {l1}", m.name);
        assert!(run.max_mass_defect < 1e-10);
    }
}

#[test]
fn godunov_shock_matches_envelope_shock() {
    let c = 1.0 / 324.0;
    let g = flux(&model(ModelName::TwoType, &[("c", c)]), -1.0, 1.0);
    let p = riemann_solve(&g, 1.0, -1.0).unwrap();
    let run = godunov_oracle(&g, 1.0, -1.0, 1.0, 1e-3).unwrap();
    let (xs, ul, ur) = run.steepest_drop(3).unwrap();
    let s = p.shocks()[0];
    assert!((xs - s.xi).abs() <= 2.0 * run.dx, "{xs} vs {}", s.xi);
    assert!(((ul - ur) - s.gap()).abs() <= 0.02, "{} vs {}", ul - ur, s.gap());
}

#[test]
fn parabolic_matches_sym_zr_closed_form() {
    let m = model(ModelName::SymZrConst, &[]);
    let d = FluxTable::diffusivity(&m, &MarginalFamily::from_model(&m).unwrap(), 0.0, 3.0).unwrap();
    let sol = parabolic_solve(&d, 3.0, 0.0, 1.0).unwrap();
    let cf = SymZrClosedForm::new(3.0, 0.0);
    let mut sup: f64 = 0.0;
    for i in 0..=800 {
        let y = -4.0 + i as f64 / 100.0;
        sup = sup.max((sol.profile.cdf(y) - cf.cdf(y, 1.0)).abs());
    }
    assert!(sup <= 1e-3, "sup = {sup}");
}

#[test]
fn parabolic_linear_diffusivity_matches_normal() {
    let m = model(ModelName::SymExclusion, &[]);
    let d = FluxTable::diffusivity(&m, &MarginalFamily::from_model(&m).unwrap(), 0.0, 1.0).unwrap();
    let sol = parabolic_solve(&d, 1.0, 0.0, 1.0).unwrap();
    for y in [-1.5, 0.0, 0.8] {
        let f = scp_limit_cdf(&sol.profile, y, 1.0).unwrap().right_value();
        assert!((f - scpkit::dynamics::normal_cdf(y)).abs() < 1e-3);
    }
}
