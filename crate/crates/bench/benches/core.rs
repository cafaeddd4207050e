use std::hint::black_box;

use boscode_core::algebra::rational;
use boscode_core::channel::patterns_up_to;
use boscode_core::{catalog_entry, damp, kraus_apply, run_monte_carlo, verify, Code, RadicalSum};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn code(id: u32) -> Code {
    catalog_entry(id).unwrap().code().unwrap()
}

fn criteria(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for id in [1u32, 2, 4, 9] {
        let code = code(id);
        group.bench_with_input(BenchmarkId::from_parameter(&code.name), &code, |b, code| {
            b.iter(|| verify(black_box(code), code.design_t).unwrap())
        });
    }
    group.finish();
}

fn channel(c: &mut Criterion) {
    let code = code(4);
    let state = code.codewords()[0].state().unwrap();
    let patterns = patterns_up_to(code.modes(), 2);
    c.bench_function("kraus_apply/example-4", |b| {
        b.iter(|| {
            for k in &patterns {
                black_box(kraus_apply(black_box(&state), k).unwrap());
            }
        })
    });
    c.bench_function("damp/example-4", |b| b.iter(|| damp(black_box(&state), None).unwrap()));
}

fn monte_carlo(c: &mut Criterion) {
    let code = code(1);
    let coeffs = [RadicalSum::sqrt(&rational(1, 2)).unwrap(), RadicalSum::sqrt(&rational(1, 2)).unwrap()];
    let gamma = rational(1, 20);
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("example-1/100k", |b| {
        b.iter(|| run_monte_carlo(&code, 1, &coeffs, &gamma, 100_000, 42).unwrap())
    });
    group.finish();
}

criterion_group!(benches, criteria, channel, monte_carlo);
criterion_main!(benches);
