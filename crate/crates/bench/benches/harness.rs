//! Whole-pipeline benchmarks: escape ensembles and series statistics.

use criterion::{criterion_group, criterion_main, Criterion};
use escapelab_core::*;
use std::hint::black_box;

fn bench_ensemble(c: &mut Criterion) {
    let mut group = c.benchmark_group("escape_ensemble");
    group.sample_size(10);

    let model = ModelParams::Nlh(NlhParams::new(2.0, 0.3, 0.75, 0.0));
    let spec = EscapeSpec {
        x_start: -0.75,
        x_abs: -6.0,
        v_start: 0.3,
        carry_volatility: true,
        max_time: Some(1e4),
    };
    let sim = SimConfig {
        dt: 0.01,
        seed: 9,
        n_events: 200,
        workers: 2,
    };
    group.bench_function("nlh_200_events", |bench| {
        bench.iter(|| black_box(run_escape_ensemble(&model, &spec, 200, &sim).unwrap()));
    });
    group.finish();
}

fn bench_stats(c: &mut Criterion) {
    let mut group = c.benchmark_group("stats");
    group.sample_size(10);

    let mut stream = RngStream::new(10, 0);
    let series: Vec<f64> = (0..1_000_000).map(|_| stream.standard_normal()).collect();

    group.bench_function("acf_100_lags_1m", |bench| {
        bench.iter(|| black_box(autocorrelation(&series, 100).unwrap()));
    });
    group.bench_function("pf_50_bins_1m", |bench| {
        bench.iter(|| black_box(empirical_pf(&series, Binning::Linear, 50).unwrap()));
    });
    group.bench_function("ks_test_100k_vs_100k", |bench| {
        let a = &series[..100_000];
        let b = &series[100_000..200_000];
        bench.iter(|| black_box(ks_test(a, b).unwrap()));
    });
    group.finish();
}

criterion_group!(benches, bench_ensemble, bench_stats);
criterion_main!(benches);
