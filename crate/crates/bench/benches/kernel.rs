use criterion::{black_box, criterion_group, criterion_main, Criterion};

use equires_core::catalog::{self, fiber_corpus};
use equires_core::delta::{delta, delta_power};
use equires_core::driver::{equiresolve, resolve_fiber, DriverConfig};
use equires_core::{Ideal, Level, Ring};

fn ideal(r: &Ring, gens: &[&str]) -> Ideal {
    Ideal::new(r.nvars(), r.m, gens.iter().map(|g| r.parse(g).unwrap()).collect())
}

fn membership(c: &mut Criterion) {
    let r = Ring::new(&["x", "z"], 2);
    let f = r.parse("eps*x^2*z^3 + x^7").unwrap();
    c.bench_function("membership ex6_9 ideal", |b| {
        b.iter(|| ideal(&r, &["z^2 + eps*x^2", "z^3 + x^3"]).contains(black_box(&f), Level::Full))
    });
    let r = Ring::new(&["x", "y", "z"], 1);
    let g = r.parse("x^3*y^3*z^3").unwrap();
    c.bench_function("membership cube of maximal ideal", |b| {
        b.iter(|| ideal(&r, &["x", "y", "z"]).power(3).contains(black_box(&g), Level::Full))
    });
}

fn deltas(c: &mut Criterion) {
    let b = catalog::ex6_10();
    let i = &b.local[0].ideal;
    c.bench_function("delta ex6_10", |bn| bn.iter(|| delta(black_box(i))));
    c.bench_function("delta^3 ex6_10", |bn| bn.iter(|| delta_power(black_box(i), 3)));
}

fn drivers(c: &mut Criterion) {
    let cfg = DriverConfig::default();
    let ex = catalog::ex8_6();
    c.bench_function("equiresolve ex8_6", |b| b.iter(|| equiresolve(black_box(&ex), &cfg).unwrap()));
    let mono = fiber_corpus().into_iter().find(|g| g.name == "mono_xyz").unwrap().object;
    c.bench_function("resolve mono_xyz", |b| b.iter(|| resolve_fiber(black_box(&mono), &cfg).unwrap()));
    let corpus = fiber_corpus();
    c.bench_function("resolve fiber corpus", |b| {
        b.iter(|| corpus.iter().map(|g| resolve_fiber(&g.object, &cfg).unwrap().steps.len()).sum::<usize>())
    });
}

criterion_group!(benches, membership, deltas, drivers);
criterion_main!(benches);
