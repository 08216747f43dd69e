use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use symspec::construct::sign_poly_for;
use symspec::fourier::{level_spectrum, wht};
use symspec::liftmat::{lift, xor_to_and_identity};
use symspec::linalg::{rank_exact, sym_eigenvalues};
use symspec::optimize::{approx_l1, signmon_exact};
use symspec::rational::q;
use symspec::{Caps, LiftKind, Mode, SymFn};

fn bench_transforms(c: &mut Criterion) {
    let caps = Caps::default();
    let mut group = c.benchmark_group("wht");
    for n in [8usize, 12, 16] {
        let g = SymFn::maj(n).expand(20).unwrap();
        group.bench_with_input(BenchmarkId::new("exact", n), &g, |b, g| b.iter(|| wht(black_box(g), Mode::Exact, &caps)));
        group.bench_with_input(BenchmarkId::new("float", n), &g, |b, g| b.iter(|| wht(black_box(g), Mode::Float, &caps)));
    }
    group.finish();
    c.bench_function("level_spectrum/maj_40", |b| {
        let f = SymFn::maj(40);
        b.iter(|| level_spectrum(black_box(&f)))
    });
}

fn bench_construct(c: &mut Criterion) {
    let f: SymFn = "0110100110010110011".parse().unwrap();
    c.bench_function("sign_poly_for/n18", |b| b.iter(|| sign_poly_for(black_box(&f))));
}

fn bench_lp(c: &mut Criterion) {
    let eps = q(1, 5);
    let f = SymFn::maj(12);
    c.bench_function("approx_l1/maj_12", |b| b.iter(|| approx_l1(black_box(&f), &eps)));
    let caps = Caps::default();
    let g = SymFn::and(3).expand(20).unwrap();
    c.bench_function("signmon_exact/and_3", |b| b.iter(|| signmon_exact(black_box(&g), &caps)));
}

fn bench_matrices(c: &mut Criterion) {
    let caps = Caps::default();
    let m = lift(&SymFn::maj(7), LiftKind::Xor, &caps).unwrap();
    let dense = m.to_f64();
    let ints = m.to_i64();
    c.bench_function("eigenvalues/xor_128", |b| b.iter(|| sym_eigenvalues(black_box(&dense), 128)));
    c.bench_function("rank_exact/xor_128", |b| b.iter(|| rank_exact(black_box(&ints), 128, 128)));
    let f = SymFn::maj(10);
    c.bench_function("xor_and_identity/n10_k5", |b| b.iter(|| xor_to_and_identity(black_box(&f), 5, 0, &caps)));
}

criterion_group!(kernels, bench_transforms, bench_construct, bench_lp, bench_matrices);
criterion_main!(kernels);
