use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qdense_bench::{abs, axes, identity, probes_1d};
use qdense_core::certify::{gap, is_quasidense, maximality_violation_search, SearchBox};
use qdense_core::convex::{FitzParams, FitzpatrickConjugate};
use qdense_core::{CertParams, PairPoint};

fn gaps(c: &mut Criterion) {
    let op = axes();
    let probe = PairPoint::new(vec![1.0, 1.0], vec![1.0, 1.0]);
    c.bench_function("gap/axes", |b| b.iter(|| gap(&op, black_box(&probe), 16.0).unwrap()));

    let id = identity();
    let probes = probes_1d();
    let params = CertParams::default();
    c.bench_function("quasidense/identity-169", |b| {
        b.iter(|| is_quasidense(&id, black_box(&probes), params.tol, &params).unwrap())
    });
}

fn maximality(c: &mut Criterion) {
    let op = axes();
    let params = CertParams::default();
    let search = SearchBox::cube(2, params.search_half_width);
    c.bench_function("maximality/axes", |b| {
        b.iter(|| maximality_violation_search(&op, black_box(&search), params.radius, &params).unwrap())
    });
}

fn fitzpatrick(c: &mut Criterion) {
    let op = abs();
    c.bench_function("fitzpatrick/table", |b| {
        b.iter(|| FitzpatrickConjugate::new(&op, black_box(FitzParams::default())).unwrap())
    });
    let table = FitzpatrickConjugate::new(&op, FitzParams::default()).unwrap();
    let point = PairPoint::scalar(0.5, 0.25);
    c.bench_function("fitzpatrick/value", |b| b.iter(|| table.value(black_box(&point)).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = gaps, maximality, fitzpatrick
}
criterion_main!(benches);
