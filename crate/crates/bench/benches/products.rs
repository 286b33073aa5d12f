use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use kdvlab::spectral::{product_dealiased, square_dealiased};
use kdvlab_bench::bench_field;

fn products(c: &mut Criterion) {
    let mut group = c.benchmark_group("product");
    for n in [64, 512, 4096] {
        let (f, g) = (bench_field(n, 1), bench_field(n, 2));
        group.bench_with_input(BenchmarkId::new("square", n), &f, |b, f| {
            b.iter(|| square_dealiased(black_box(f)))
        });
        group.bench_with_input(BenchmarkId::new("product", n), &(f, g), |b, (f, g)| {
            b.iter(|| product_dealiased(black_box(f), black_box(g)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, products);
criterion_main!(benches);
