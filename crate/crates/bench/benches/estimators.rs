use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use charvol::estimators::{
    bipower_variation, debiased_iv, integrated_vol, panel_debiased_daily, truncated_rv,
    PanelOptions,
};
use charvol::{EstimatorConfig, Kappa};
use charvol_bench::fixture_days;

fn one_day(c: &mut Criterion) {
    let mut group = c.benchmark_group("one_day");
    for per_day in [2400.0, 4800.0] {
        let day = fixture_days(per_day, 1, 1).remove(0);
        let k_n = if per_day == 2400.0 { 240 } else { 320 };
        for kappa in [Kappa::Plain, Kappa::Symmetrized] {
            let cfg = EstimatorConfig::new(k_n, 0.9, 1.5, kappa).unwrap();
            let id = format!("{per_day}/kappa={}", kappa.get());
            group.bench_with_input(BenchmarkId::new("integrated_vol", &id), &cfg, |b, cfg| {
                b.iter(|| integrated_vol(black_box(&day), cfg, 1.0).unwrap())
            });
            group.bench_with_input(BenchmarkId::new("debiased_iv", &id), &cfg, |b, cfg| {
                b.iter(|| debiased_iv(black_box(&day), cfg, 1.0).unwrap())
            });
        }
        group.bench_function(BenchmarkId::new("truncated_rv", per_day), |b| {
            b.iter(|| truncated_rv(black_box(&day), 1.0, 0.09).unwrap())
        });
        group.bench_function(BenchmarkId::new("bipower", per_day), |b| {
            b.iter(|| bipower_variation(black_box(&day), 0.0, 1.0).unwrap())
        });
    }
    group.finish();
}

fn panel(c: &mut Criterion) {
    let days = fixture_days(2400.0, 132, 2);
    let opts = PanelOptions::new(240, 1.5);
    let mut group = c.benchmark_group("panel");
    group.sample_size(10);
    group.bench_function("132_days_2400", |b| {
        b.iter(|| panel_debiased_daily(black_box(&days), &opts).unwrap())
    });
    group.finish();
}

criterion_group!(benches, one_day, panel);
criterion_main!(benches);
