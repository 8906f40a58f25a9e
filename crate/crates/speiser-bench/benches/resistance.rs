//! Electrical solves and walk sampling on the type-estimation side.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use speiser_core::families::{binary_tree_scheme, double_exp_scheme, exp_scheme};
use speiser_core::surgery::{collide_scheme, CollisionSpec};
use speiser_core::typeest::{effective_resistance, random_walk_escape};
use speiser_core::SphereValue;

fn re(x: f64) -> SphereValue {
    SphereValue::real(x)
}

fn bench_resistance(c: &mut Criterion) {
    let mut g = c.benchmark_group("resistance");
    g.sample_size(20);
    for top in [8usize, 12] {
        g.bench_with_input(BenchmarkId::new("exp-profile", top), &top, |b, &top| {
            let s = exp_scheme();
            let radii: Vec<usize> = (1..=top).collect();
            b.iter(|| effective_resistance(&s, &radii, 1e-10).unwrap());
        });
        g.bench_with_input(BenchmarkId::new("tree-profile", top), &top, |b, &top| {
            let s = binary_tree_scheme();
            let radii: Vec<usize> = (1..=top).collect();
            b.iter(|| effective_resistance(&s, &radii, 1e-10).unwrap());
        });
    }
    g.bench_function("collided-dexp-profile-8", |b| {
        let inner = double_exp_scheme(re(-9.0), re(-3.0)).unwrap();
        let s = collide_scheme(inner.as_ref(), CollisionSpec {
            moving: re(-9.0),
            target: SphereValue::Infinity,
        })
        .unwrap();
        let radii: Vec<usize> = (2..=8).collect();
        b.iter(|| effective_resistance(&s, &radii, 1e-10).unwrap());
    });
    g.finish();

    let mut g = c.benchmark_group("walk");
    g.sample_size(20);
    for trials in [1_000u64, 10_000] {
        g.bench_with_input(BenchmarkId::new("exp-escape", trials), &trials, |b, &trials| {
            let s = exp_scheme();
            b.iter(|| random_walk_escape(&s, 8, trials, 0).unwrap());
        });
    }
    g.finish();
}

criterion_group!(benches, bench_resistance);
criterion_main!(benches);
