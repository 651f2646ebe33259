use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use g2rc::harness::{verify, VerifyOptions};
use g2rc::inverse::phi_inv_with_fallback;
use g2rc::paths::enumerate_paths;
use g2rc::phi;
use g2rc_bench::{configurations, paths, BIG_L, LAMBDA};

fn forward(c: &mut Criterion) {
    let rcs = configurations();
    c.bench_function("phi over RC(3,0; 5)", |b| {
        b.iter(|| rcs.iter().map(|rc| phi(black_box(rc)).unwrap().len()).sum::<usize>())
    });
}

fn inverse(c: &mut Criterion) {
    let ps = paths();
    c.bench_function("phi_inv over P(3,0; 5)", |b| {
        b.iter(|| ps.iter().map(|p| phi_inv_with_fallback(black_box(p)).unwrap().1.len()).sum::<usize>())
    });
}

fn oracle(c: &mut Criterion) {
    c.bench_function("enumerate_paths(3,0; 5)", |b| b.iter(|| enumerate_paths(black_box(LAMBDA), BIG_L).unwrap()));
}

fn cell(c: &mut Criterion) {
    let opts = VerifyOptions::for_length(BIG_L);
    c.bench_function("verify(3,0; 5)", |b| b.iter(|| verify(black_box(LAMBDA), BIG_L, &opts).unwrap()));
}

criterion_group!(benches, forward, inverse, oracle, cell);
criterion_main!(benches);
