use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use escape_bench::{uniform_two, varying_hole, worked};
use escape_core::{escape_rate_genfun, escape_rate_spectral, estimate_rate_oracle, Tolerances};

fn worked_example(c: &mut Criterion) {
    let (m, h) = worked();
    let tol = Tolerances::default();
    let mut g = c.benchmark_group("worked");
    g.bench_function("spectral", |b| b.iter(|| escape_rate_spectral(&m, &h, &tol).unwrap()));
    g.bench_function("generating", |b| b.iter(|| escape_rate_genfun(&m, &h, &tol).unwrap()));
    g.bench_function("oracle_60", |b| b.iter(|| estimate_rate_oracle(&m, &h, 60).unwrap()));
    g.finish();
}

fn word_length(c: &mut Criterion) {
    let m = uniform_two();
    let tol = Tolerances::default();
    let mut g = c.benchmark_group("word_length");
    g.sample_size(10);
    for r in [2, 4, 6, 8] {
        let h = varying_hole(&m, r);
        g.bench_with_input(BenchmarkId::new("generating", r), &h, |b, h| {
            b.iter(|| escape_rate_genfun(&m, h, &tol).unwrap())
        });
        if r <= 6 {
            g.bench_with_input(BenchmarkId::new("spectral", r), &h, |b, h| {
                b.iter(|| escape_rate_spectral(&m, h, &tol).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, worked_example, word_length);
criterion_main!(benches);
