use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use parity_forge_bench::{random, side_conditions, worked_example};
use parity_forge_core::{compile, verify, CompilerConfig, Strategy, VerifyOptions};
use std::hint::black_box;

fn bench_compile(c: &mut Criterion) {
    let greedy = CompilerConfig::default();
    let beam = CompilerConfig {
        strategy: Strategy::Beam(4),
        ..CompilerConfig::default()
    };
    let example = worked_example();
    c.bench_function("compile/worked_example", |b| b.iter(|| compile(black_box(&example), &greedy).unwrap()));
    let constrained = side_conditions();
    c.bench_function("compile/side_conditions", |b| b.iter(|| compile(black_box(&constrained), &greedy).unwrap()));

    let mut group = c.benchmark_group("compile/random");
    for n in [4, 6, 8] {
        let p = random(n, 2 * n + 4, n as u64);
        group.bench_with_input(BenchmarkId::new("greedy", n), &p, |b, p| b.iter(|| compile(p, &greedy).unwrap()));
        group.bench_with_input(BenchmarkId::new("beam4", n), &p, |b, p| b.iter(|| compile(p, &beam).unwrap()));
    }
    group.finish();
}

fn bench_verify(c: &mut Criterion) {
    let p = worked_example();
    let doc = compile(&p, &CompilerConfig::default()).unwrap().to_doc();
    c.bench_function("verify/worked_example", |b| {
        b.iter(|| verify(black_box(&doc), &p, VerifyOptions::exhaustive()))
    });
    let p = random(6, 10, 3);
    let doc = compile(&p, &CompilerConfig::default()).unwrap().to_doc();
    c.bench_function("verify/random_6x10", |b| b.iter(|| verify(black_box(&doc), &p, VerifyOptions::exhaustive())));
}

criterion_group!(benches, bench_compile, bench_verify);
criterion_main!(benches);
