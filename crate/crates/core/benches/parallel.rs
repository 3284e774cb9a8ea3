//! Sequential versus pooled runs of the data-parallel kernels. Build with
//! `--no-default-features` to measure the plain-loop fallback instead.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use otlab::fourier::{dft, pmf_of_linear_image};
use otlab::modlinalg::{count_01_in_rowspace, ModMatrix};
use otlab::par;
use otlab::solver::{max_oddtown, NODE_BUDGET};

fn pseudo_random_matrix(rows: usize, cols: usize, p: u64, seed: u64) -> ModMatrix {
    let mut state = seed;
    let data = (0..rows * cols)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % p
        })
        .collect();
    ModMatrix::new(rows, cols, p, data).expect("valid matrix")
}

fn thread_counts() -> Vec<usize> {
    let all = par::current_threads();
    if all > 1 {
        vec![1, all]
    } else {
        vec![1]
    }
}

fn bench_fourier(c: &mut Criterion) {
    let l = pseudo_random_matrix(16, 4, 7, 1);
    let f = pmf_of_linear_image(&l).expect("within budget");
    let mut group = c.benchmark_group("fourier");
    for threads in thread_counts() {
        group.bench_with_input(BenchmarkId::new("pmf_d16_c4_p7", threads), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || pmf_of_linear_image(black_box(&l)).expect("pmf")))
        });
        group.bench_with_input(BenchmarkId::new("dft_c4_p7", threads), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || dft(black_box(&f)).expect("dft")))
        });
    }
    group.finish();
}

fn bench_rowspace(c: &mut Criterion) {
    let m = ModMatrix::binary(9, 12, |i, j| (i * 7 + j * 3) % 5 < 2 || i == j);
    let mut group = c.benchmark_group("rowspace");
    for threads in thread_counts() {
        group.bench_with_input(BenchmarkId::new("count01_9x12_p5", threads), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || count_01_in_rowspace(black_box(&m), 5).expect("count")))
        });
    }
    group.finish();
}

fn bench_solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver");
    group.sample_size(10);
    for threads in thread_counts() {
        group.bench_with_input(BenchmarkId::new("max_oddtown_n7_l6", threads), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || max_oddtown(black_box(7), 6, NODE_BUDGET).expect("solve")))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_fourier, bench_rowspace, bench_solver);
criterion_main!(benches);
