use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pdsvrp_bench::pair;
use pdsvrp_core::heuristics::{construct_initial, improve};
use pdsvrp_core::io::{parse_native, serialize_native};
use pdsvrp_core::oracle::brute_force;

fn heuristics(c: &mut Criterion) {
    let mut g = c.benchmark_group("heuristics");
    g.sample_size(10);
    for n in [20, 50] {
        let (mt, mc) = pair(n, 1);
        for (label, inst) in [("mt", &mt), ("mc", &mc)] {
            let Some(start) = construct_initial(inst) else { continue };
            g.bench_with_input(BenchmarkId::new(format!("improve-{label}"), n), inst, |b, i| {
                b.iter(|| improve(black_box(i), &start, Duration::from_secs(5), 0))
            });
        }
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    let (mt, mc) = pair(6, 2);
    g.bench_function("brute_force-mt-n6", |b| b.iter(|| brute_force(black_box(&mt)).unwrap()));
    g.bench_function("brute_force-mc-n6", |b| b.iter(|| brute_force(black_box(&mc)).unwrap()));
    g.finish();
}

fn native_format(c: &mut Criterion) {
    let (_, mc) = pair(100, 4);
    let text = serialize_native(&mc);
    c.bench_function("parse_native-n100", |b| b.iter(|| parse_native(black_box(&text)).unwrap()));
    c.bench_function("serialize_native-n100", |b| b.iter(|| serialize_native(black_box(&mc))));
}

criterion_group!(benches, heuristics, oracle, native_format);
criterion_main!(benches);
