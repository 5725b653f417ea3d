use std::collections::BTreeMap;

use proptest::prelude::*;
use scpkit::dynamics::{replica_rng, Configuration, CoupledState, Dynamics, SumTree};
use scpkit::harness::FamilyChoice;
use scpkit::hydro::{riemann_solve, FluxTable};
use scpkit::measures::{hat_nu, ExplicitTable, MarginalFamily};
use scpkit::model::{build_model, ModelName, ModelSpec, Occupancy};

fn model(name: ModelName, kv: &[(&str, f64)]) -> ModelSpec {
    let params: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    build_model(name, &params).unwrap()
}

fn attractive_model() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        (0.5f64..=1.0).prop_map(|p| model(ModelName::Asep, &[("p", p)])),
        (0.01f64..=0.5).prop_map(|c| model(ModelName::TwoType, &[("c", c)])),
        (2u32..=3, 0.5f64..=1.0).prop_map(|(k, p)| model(ModelName::KExclusion, &[("K", f64::from(k)), ("p", p)])),
        (0.05f64..=1.0).prop_map(|c| model(ModelName::SymTwoType, &[("c", c)])),
    ]
}

/// Ordered pair `upper >= lower` on 9 sites within the model support.
fn ordered_pair(m: &ModelSpec, seeds: &[(u8, u8)]) -> (Vec<Occupancy>, Vec<Occupancy>) {
    let r = m.range();
    let width = (r.sim_cap - r.sim_floor + 1) as u8;
    seeds
        .iter()
        .map(|&(a, b)| {
            let lo = r.sim_floor + Occupancy::from(a % width);
            let room = (r.sim_cap - lo + 1) as u8;
            (lo + Occupancy::from(b % room), lo)
        })
        .unzip()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basic_coupling_keeps_order(
        m in attractive_model(),
        seeds in prop::collection::vec((any::<u8>(), any::<u8>()), 9),
        t in 0.01f64..3.0,
        seed in any::<u64>(),
    ) {
        let (upper, lower) = ordered_pair(&m, &seeds);
        let mut state = CoupledState::new(Configuration::new(4, upper), Configuration::new(4, lower));
        let before = state.discrepancy_total();
        let totals = (state.upper().total_particles(), state.lower().total_particles());
        let mut rng = replica_rng(seed, 0, 0);
        Dynamics::for_model(&m).evolve_coupled(&mut state, t, &mut rng, true).unwrap();
        prop_assert!(state.is_ordered());
        prop_assert!(state.discrepancy_total() <= before);
        prop_assert_eq!((state.upper().total_particles(), state.lower().total_particles()), totals);
    }

    #[test]
    fn sum_tree_find_matches_scan(
        weights in prop::collection::vec(0.0f64..10.0, 1..200),
        frac in 0.0f64..1.0,
    ) {
        let tree = SumTree::from_weights(&weights);
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 0.0);
        prop_assert!((tree.total() - total).abs() <= 1e-9 * total);
        let (i, _) = tree.find(frac * tree.total());
        prop_assert!(weights[i] > 0.0);
        let before: f64 = weights[..i].iter().sum();
        prop_assert!(before <= frac * total + 1e-9 * total);
        prop_assert!(before + weights[i] >= frac * total - 1e-9 * total);
    }

    #[test]
    fn explicit_family_round_trips(
        raw in prop::collection::vec(0.05f64..1.0, 4),
        shift in 0.1f64..0.9,
    ) {
        let total: f64 = raw.iter().sum();
        let base: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mut up = vec![0.0; base.len()];
        for (i, w) in base.iter().enumerate() {
            let j = (i + 1).min(base.len() - 1);
            up[i] += w * (1.0 - shift);
            up[j] += w * shift;
        }
        let choice = FamilyChoice::Explicit { table: ExplicitTable { floor: 0, cap: 3, tables: vec![base, up] } };
        let text = serde_json::to_string(&choice).unwrap();
        let back: FamilyChoice = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &choice);
        let m = model(ModelName::KExclusion, &[("K", 3.0)]);
        let (a, b) = (choice.build(&m).unwrap(), back.build(&m).unwrap());
        prop_assert_eq!(a.explicit_table(), b.explicit_table());
        let (lo, hi) = a.density_domain();
        let (pa, pb) = (a.pmf(hi).unwrap(), b.pmf(hi).unwrap());
        prop_assert_eq!(pa.probs(), pb.probs());
        prop_assert!((pa.mean() - hi).abs() < 1e-12 && lo < hi);
    }

    #[test]
    fn hat_marginal_is_normalized(c in 0.01f64..=0.5, lambda in -0.9f64..0.8, gap in 0.05f64..1.0) {
        let rho = (lambda + gap).min(0.95);
        prop_assume!(rho > lambda);
        let m = model(ModelName::TwoType, &[("c", c)]);
        let family = MarginalFamily::from_model(&m).unwrap();
        let hat = hat_nu(&family, rho, lambda).unwrap();
        prop_assert!((hat.total_mass() - 1.0).abs() < 1e-9);
        prop_assert!(hat.entries().iter().all(|e| e.weight >= 0.0));
    }

    #[test]
    fn riemann_profile_is_monotone(c in 0.002f64..=0.5, lambda in -0.9f64..0.5, gap in 0.1f64..1.0) {
        let rho = (lambda + gap).min(0.9);
        let m = model(ModelName::TwoType, &[("c", c)]);
        let family = MarginalFamily::from_model(&m).unwrap();
        let g = FluxTable::flux(&m, &family, lambda, rho).unwrap();
        let p = riemann_solve(&g, rho, lambda).unwrap();
        let (a, b) = p.support();
        let mut prev = rho;
        for k in 0..=200 {
            let xi = a - 0.1 + (b - a + 0.2) * f64::from(k) / 200.0;
            let u = p.u(xi);
            prop_assert!(u <= prev + 1e-9 && u >= lambda - 1e-9 && u <= rho + 1e-9);
            prev = u;
        }
        prop_assert!((p.cdf(a - 1.0)).abs() < 1e-12 && (p.cdf(b + 1.0) - 1.0).abs() < 1e-12);
    }
}
