//! End-to-end flows: per-graph features, dataset benchmarks, the depth-1
//! analytic demo and the detection-noise study.

mod benchmark;
mod demo;
mod features;
mod noise;

pub use benchmark::{
    run_benchmark, BaselineResult, BenchmarkConfig, BenchmarkReport, QeResult, REPORT_FIELDS,
};
pub use demo::{run_analytic_demo, DemoConfig, DemoGraph, DemoReport};
pub use features::{
    compute_features, evolve_graph, feature_kernel, graph_features, EvolutionSpec, FeatureConfig,
    FeatureSet,
};
pub use noise::{
    geometric_proxy, run_noise_study, select_subset, NoiseStudyConfig, NoiseStudyReport,
    NOISE_QUANTILES,
};

/// Derives an independent seed for item `(a, b)` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        .wrapping_add(a.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(b.wrapping_mul(0xd1b5_4a32_d192_ed03));
    // splitmix64 finaliser
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
