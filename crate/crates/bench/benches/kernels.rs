use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use retina_core::synthetic::{labeled_bank, SyntheticConfig};
use retina_core::*;

fn generate(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_kernel");
    for size in [3, 7, 15] {
        let spec = DoGSpec::new(size, 0.3, Polarity::OnCenter).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(size), &spec, |b, spec| {
            b.iter(|| generate_kernel(black_box(spec)).unwrap())
        });
    }
    group.finish();
}

fn bank(c: &mut Criterion) {
    let config = SamplerConfig::new(1, 9);
    c.bench_function("sample_bank/512x9", |b| b.iter(|| sample_bank(black_box(&config), 512).unwrap()));
}

fn clustering(c: &mut Criterion) {
    let (kernels, _) = labeled_bank(&SyntheticConfig::new(7, 100, 0.1, 3)).unwrap();
    let points: Vec<Vec<f64>> = kernels.iter().map(|k| min_max_encode(k).into_weights()).collect();
    let config = KMeansConfig::with_seed(0);
    c.bench_function("kmeans/300x49", |b| b.iter(|| kmeans(black_box(&points), &config).unwrap()));

    let set = KernelSet::new(kernels, "synthetic").unwrap();
    c.bench_function("analyze/300x7x7", |b| b.iter(|| analyze(black_box(&set), &config).unwrap()));
}

criterion_group!(benches, generate, bank, clustering);
criterion_main!(benches);
