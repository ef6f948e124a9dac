//! The data-parallel stages on a one-thread pool against the full pool.
//! Built without the `parallel` feature, only the sequential path is timed.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qek_core::classical::random_walk_kernel_matrix;
use qek_core::graph::{erdos_renyi, Graph};
use qek_core::kernel::{kernel_matrix, KernelMatrix};
use qek_core::measure::ProbabilityDistribution;
use qek_core::ml::{cross_validate, CvConfig};
use qek_core::pipeline::{compute_features, FeatureConfig};

fn graphs(count: usize, nodes: usize) -> Vec<Graph> {
    (0..count)
        .map(|i| erdos_renyi(nodes, 0.4, i as u64).with_id(i))
        .collect()
}

fn distributions(count: usize) -> Vec<ProbabilityDistribution> {
    compute_features(&graphs(count, 8), &FeatureConfig::default())
        .unwrap()
        .distributions
}

fn block_kernel(n: usize) -> (KernelMatrix, Vec<usize>) {
    let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let k = KernelMatrix::from_fn((0..n).collect(), |i, j| {
        if y[i] == y[j] {
            0.9
        } else {
            0.6
        }
    });
    (k, y)
}

#[cfg(feature = "parallel")]
fn modes() -> Vec<(&'static str, rayon::ThreadPool)> {
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    vec![
        ("sequential", pool(1)),
        ("parallel", pool(rayon::current_num_threads())),
    ]
}

fn run_modes<F: Fn() + Sync>(c: &mut Criterion, group: &str, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10).measurement_time(Duration::from_secs(3));
    #[cfg(feature = "parallel")]
    for (name, pool) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(&f))
        });
    }
    #[cfg(not(feature = "parallel"))]
    g.bench_function(BenchmarkId::from_parameter("sequential"), |b| b.iter(&f));
    g.finish();
}

fn benches(c: &mut Criterion) {
    let gs = graphs(32, 10);
    let cfg = FeatureConfig::default();
    run_modes(c, "features_32x10q", || {
        compute_features(&gs, &cfg).unwrap();
    });

    let dists = distributions(200);
    run_modes(c, "qe_gram_200", || {
        kernel_matrix(&dists, 1.0).unwrap();
    });

    let small = graphs(40, 12);
    run_modes(c, "random_walk_40", || {
        random_walk_kernel_matrix(&small, 1e-3).unwrap();
    });

    let (k, y) = block_kernel(120);
    let cv = CvConfig {
        repeats: 2,
        ..Default::default()
    };
    run_modes(c, "svm_cv_120", || {
        cross_validate(&k, &y, &cv).unwrap();
    });
}

criterion_group!(parallel_vs_sequential, benches);
criterion_main!(parallel_vs_sequential);
