use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wold_bench::{bidisc_pair, pattern_tuple, weighted_pair};
use wold_core::{check_equal_range, verify_wandering_identities, wold_single, wold_tuple, Lattice, OperatorKind, StructuredOperator, Window};

const TOL: f64 = 1e-10;

fn hypotheses(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_equal_range");
    for case in [weighted_pair(8), bidisc_pair(6)] {
        group.bench_function(case.name, |b| b.iter(|| check_equal_range(&case.operators, 2, &case.window, TOL).unwrap()));
    }
    group.finish();
}

fn single(c: &mut Criterion) {
    let mut group = c.benchmark_group("wold_single");
    let lattice = Lattice::half_line_power(2);
    let shift = StructuredOperator::new(OperatorKind::shift(0), &lattice).unwrap();
    for depth in [4u32, 8, 16] {
        let window = Window::new(&lattice, depth);
        group.bench_with_input(BenchmarkId::from_parameter(depth), &window, |b, w| {
            b.iter(|| wold_single(&shift, w, depth as usize, TOL).unwrap())
        });
    }
    group.finish();
}

fn tuple(c: &mut Criterion) {
    let mut group = c.benchmark_group("wold_tuple");
    group.sample_size(10);
    let bidisc = bidisc_pair(6);
    group.bench_function(bidisc.name, |b| b.iter(|| wold_tuple(&bidisc.operators, &bidisc.window, bidisc.max_power, TOL).unwrap()));
    for n in [2usize, 3] {
        let case = pattern_tuple(n, 3, 4);
        group.bench_with_input(BenchmarkId::new(case.name, n), &case, |b, case| {
            b.iter(|| wold_tuple(&case.operators, &case.window, case.max_power, TOL).unwrap())
        });
    }
    group.finish();
}

fn identities(c: &mut Criterion) {
    let case = bidisc_pair(6);
    c.bench_function("wandering_identities/bidisc_pair", |b| {
        b.iter(|| verify_wandering_identities(&case.operators, &case.window, TOL).unwrap())
    });
}

criterion_group!(benches, hypotheses, single, tuple, identities);
criterion_main!(benches);
