use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stator_bench::{improved_case, multiparty_case};
use stator_core::analysis::{default_grid, generate_curve, plan_for_xi};
use stator_core::multiparty::run_multiparty_protocol;
use stator_core::protocol::{run_improved_protocol, DEFAULT_B};

fn improved(c: &mut Criterion) {
    let case = improved_case();
    c.bench_function("improved_protocol", |b| {
        b.iter(|| run_improved_protocol(black_box(&case.params), &case.gate, &case.target).unwrap())
    });
}

fn multiparty(c: &mut Criterion) {
    let mut group = c.benchmark_group("multiparty");
    group.sample_size(10);
    for parties in [2, 3, 4] {
        let case = multiparty_case(parties);
        group.bench_with_input(BenchmarkId::from_parameter(parties), &case, |b, case| {
            b.iter(|| {
                run_multiparty_protocol(&case.spec, case.xi, &case.mode, &case.target).unwrap()
            })
        });
    }
    group.finish();
}

fn analysis(c: &mut Criterion) {
    let grid = default_grid();
    c.bench_function("curve_2000", |b| {
        b.iter(|| generate_curve(black_box(DEFAULT_B), &grid).unwrap())
    });
    c.bench_function("plan", |b| {
        b.iter(|| plan_for_xi(black_box(0.17), DEFAULT_B).unwrap())
    });
}

criterion_group!(benches, improved, multiparty, analysis);
criterion_main!(benches);
