//! Ball extraction and canonical encoding across the catalog schemes.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use speiser_core::families::{double_exp_scheme, exp_scheme, hyperbolic_scheme};
use speiser_core::graph::ball_of_patch;
use speiser_core::{ball, canonical_code, SphereValue};

const BUDGET: usize = 1_000_000;

fn re(x: f64) -> SphereValue {
    SphereValue::real(x)
}

fn bench_balls(c: &mut Criterion) {
    let mut g = c.benchmark_group("ball");
    for r in [4usize, 8, 16] {
        g.bench_with_input(BenchmarkId::new("exp", r), &r, |b, &r| {
            let s = exp_scheme();
            b.iter(|| ball(&s, r, BUDGET).unwrap());
        });
    }
    for r in [3usize, 5, 7] {
        g.bench_with_input(BenchmarkId::new("dexp", r), &r, |b, &r| {
            let s = double_exp_scheme(re(-9.0), re(-3.0)).unwrap();
            b.iter(|| ball(s.as_ref(), r, BUDGET).unwrap());
        });
        g.bench_with_input(BenchmarkId::new("hyp", r), &r, |b, &r| {
            let s = hyperbolic_scheme(re(-3.0)).unwrap();
            b.iter(|| ball(&s, r, BUDGET).unwrap());
        });
    }
    g.finish();

    let mut g = c.benchmark_group("canonical");
    for r in [2usize, 4] {
        g.bench_with_input(BenchmarkId::new("dexp-code", r), &r, |b, &r| {
            let s = double_exp_scheme(re(-9.0), re(-3.0)).unwrap();
            let p = ball(s.as_ref(), r, BUDGET).unwrap();
            b.iter(|| canonical_code(&p).unwrap());
        });
    }
    g.bench_function("retruncate-dexp-5-to-3", |b| {
        let s = double_exp_scheme(re(-9.0), re(-3.0)).unwrap();
        let p = ball(s.as_ref(), 5, BUDGET).unwrap();
        b.iter(|| ball_of_patch(&p, 3, BUDGET).unwrap());
    });
    g.finish();
}

criterion_group!(benches, bench_balls);
criterion_main!(benches);
