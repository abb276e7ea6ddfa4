use covspec_core::value::Value;
use covspec_core::{covering_spectrum, enumerate_shift_classes, MetricGraph, SearchBudgets};
use criterion::{criterion_group, criterion_main, Criterion};

fn bench_shift_classes(c: &mut Criterion) {
    let g = MetricGraph::wedge_of_circles(&[
        Value::from_int(2),
        Value::from_int(3),
        Value::from_int(5),
    ]);
    c.bench_function("shift_classes_wedge3_h12", |b| {
        b.iter(|| enumerate_shift_classes(&g, &Value::from_int(12), 1_000_000))
    });
}

fn bench_covering_spectrum(c: &mut Criterion) {
    let g = MetricGraph::parse(
        "v a\nv b\ne p a a 1\ne q b b 2\ne bar a b 2\ne back a b 3\nbase a\n",
    )
    .unwrap();
    c.bench_function("covspec_two_loop_theta", |b| {
        b.iter(|| covering_spectrum(&g, None, &SearchBudgets::default()))
    });
}

fn bench_lattice(c: &mut Criterion) {
    let diams = vec![Value::from_int(3), Value::from_int(2), Value::from_int(1)];
    c.bench_function("lattice_covspec_3_2_1", |b| {
        b.iter(|| covspec_core::lattice_covering_spectrum(&diams))
    });
}

criterion_group!(benches, bench_shift_classes, bench_covering_spectrum, bench_lattice);
criterion_main!(benches);
