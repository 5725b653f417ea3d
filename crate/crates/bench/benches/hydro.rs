use criterion::{criterion_group, criterion_main, Criterion};
use scpkit::hydro::{godunov_oracle, parabolic_solve, riemann_solve, FluxTable};
use scpkit::model::ModelName;
use scpkit_bench::flux;

fn envelope(c: &mut Criterion) {
    let g = flux(ModelName::TwoType, &[("c", 1.0 / 324.0)], -1.0, 1.0);
    c.bench_function("riemann_two_type", |b| b.iter(|| riemann_solve(&g, 1.0, -1.0).unwrap()));
    let g = flux(ModelName::ZrConst, &[], 0.0, 1.0);
    c.bench_function("riemann_zr_const", |b| b.iter(|| riemann_solve(&g, 1.0, 0.0).unwrap()));
}

fn godunov(c: &mut Criterion) {
    let g = flux(ModelName::Tasep, &[], 0.0, 1.0);
    c.bench_function("godunov_tasep_dx1e-2", |b| b.iter(|| godunov_oracle(&g, 1.0, 0.0, 1.0, 1e-2).unwrap()));
}

fn parabolic(c: &mut Criterion) {
    let d = FluxTable::from_fn("linear", 0.0, 3.0, |u| u).unwrap();
    let mut group = c.benchmark_group("parabolic");
    group.sample_size(10);
    group.bench_function("linear", |b| b.iter(|| parabolic_solve(&d, 3.0, 0.0, 1.0).unwrap()));
    group.finish();
}

criterion_group!(benches, envelope, godunov, parabolic);
criterion_main!(benches);
