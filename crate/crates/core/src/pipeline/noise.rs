use serde::{Deserialize, Serialize};

use super::derive_seed;
use super::features::{evolve_graph, EvolutionSpec, FeatureConfig};
use crate::graph::{preprocess, random_geometric, Dataset, Graph};
use crate::kernel::{qe_kernel, quantile};
use crate::measure::{apply_detection_noise, histogram_from_samples, sample_bitstrings, NoiseModel};
use crate::parallel::*;
use crate::{Error, Result};

/// Quantiles reported for the relative kernel change.
pub const NOISE_QUANTILES: [f64; 3] = [0.5, 0.9, 0.999];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseStudyConfig {
    /// Evolution, observable and binning; shots and noise come from below.
    pub features: FeatureConfig,
    pub shots: usize,
    pub estimations: usize,
    pub noise: NoiseModel,
    pub mu: f64,
    pub seed: u64,
}

impl Default for NoiseStudyConfig {
    fn default() -> Self {
        Self {
            features: FeatureConfig {
                evolution: EvolutionSpec::Hardware {
                    durations_ns: Default::default(),
                    hardware: Default::default(),
                },
                ..Default::default()
            },
            shots: 10_000,
            estimations: 100,
            noise: NoiseModel {
                epsilon: 0.05,
                epsilon_prime: 0.05,
            },
            mu: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseStudyReport {
    pub config: NoiseStudyConfig,
    pub graphs: usize,
    /// `(i, j)` for every entry of `delta_k`, `i < j`.
    pub pairs: Vec<(usize, usize)>,
    /// `|1 − ⟨K_ε⟩ / ⟨K_0⟩|` per pair, averaged over estimations.
    pub delta_k: Vec<f64>,
    pub quantiles: Vec<(f64, f64)>,
    pub fraction_above_10_percent: f64,
}

impl NoiseStudyReport {
    /// Sorted values with their cumulative fractions.
    pub fn cdf(&self) -> Vec<(f64, f64)> {
        let mut v = self.delta_k.clone();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        v.into_iter()
            .enumerate()
            .map(|(i, x)| (x, (i + 1) as f64 / n))
            .collect()
    }
}

/// Repeats a shot-based kernel estimate, scoring the same samples once as
/// measured and once after detection errors, and compares the averaged
/// kernels pairwise.
pub fn run_noise_study(graphs: &[Graph], cfg: &NoiseStudyConfig) -> Result<NoiseStudyReport> {
    cfg.noise.validate().map_err(crate::Error::from)?;
    if graphs.len() < 2 || cfg.estimations == 0 || cfg.shots == 0 {
        return Err(Error::Config(
            "the noise study needs two graphs, one estimation and one shot".into(),
        ));
    }
    let states = graphs
        .par_iter()
        .map(|g| evolve_graph(g, &cfg.features.evolution, cfg.features.max_qubits))
        .collect::<Result<Vec<_>>>()?;
    let n = graphs.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut clean_sum = vec![0.0; pairs.len()];
    let mut noisy_sum = vec![0.0; pairs.len()];
    let (obs, binning) = (cfg.features.observable, &cfg.features.binning);

    for e in 0..cfg.estimations {
        let hists = (0..n)
            .into_par_iter()
            .map(|g| {
                let seed = derive_seed(cfg.seed, e as u64, g as u64);
                let mut samples = sample_bitstrings(&states[g], cfg.shots, NoiseModel::NONE, seed)?;
                let clean = histogram_from_samples(&samples, &graphs[g], obs, binning)?;
                apply_detection_noise(&mut samples, graphs[g].num_nodes(), cfg.noise, !seed)?;
                let noisy = histogram_from_samples(&samples, &graphs[g], obs, binning)?;
                Ok((clean, noisy))
            })
            .collect::<Result<Vec<_>>>()?;
        let values: Vec<(f64, f64)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                (
                    qe_kernel(&hists[i].0, &hists[j].0, cfg.mu),
                    qe_kernel(&hists[i].1, &hists[j].1, cfg.mu),
                )
            })
            .collect();
        for (k, (c, v)) in values.into_iter().enumerate() {
            clean_sum[k] += c;
            noisy_sum[k] += v;
        }
    }

    let delta_k: Vec<f64> = clean_sum
        .iter()
        .zip(&noisy_sum)
        .map(|(c, v)| (1.0 - v / c).abs())
        .collect();
    let quantiles = NOISE_QUANTILES
        .iter()
        .map(|&q| (q, quantile(&delta_k, q).unwrap_or(0.0)))
        .collect();
    let above = delta_k.iter().filter(|&&d| d > 0.1).count();
    Ok(NoiseStudyReport {
        config: cfg.clone(),
        graphs: n,
        fraction_above_10_percent: above as f64 / delta_k.len() as f64,
        pairs,
        delta_k,
        quantiles,
    })
}

/// The first `limit` graphs (dataset order) with at most `max_nodes` nodes and
/// an original class in `classes`, with their positions in `dataset`.
pub fn select_subset(
    dataset: &Dataset,
    max_nodes: usize,
    classes: &[i64],
    limit: usize,
) -> Result<(Dataset, Vec<usize>)> {
    let mut picked = Vec::new();
    for (i, g) in dataset.graphs.iter().enumerate() {
        if picked.len() == limit {
            break;
        }
        let n = g.num_nodes();
        if n > 0 && n <= max_nodes && classes.contains(&dataset.original_label(i)) {
            picked.push(i);
        }
    }
    let graphs: Vec<Graph> = picked.iter().map(|&i| dataset.graphs[i].clone()).collect();
    let raw: Vec<i64> = picked.iter().map(|&i| dataset.original_label(i)).collect();
    let subset = Dataset::from_raw_labels(dataset.name.clone(), graphs, &raw)?;
    // re-run the standard filter so labels are re-encoded the usual way
    Ok((preprocess(&subset, max_nodes, Some(classes))?, picked))
}

/// Random geometric graphs with node positions, sizes cycling through
/// `4..=max_nodes`.
pub fn geometric_proxy(count: usize, max_nodes: usize, seed: u64) -> Vec<Graph> {
    let sizes = 4..=max_nodes.max(4);
    let span = sizes.clone().count();
    (0..count)
        .map(|i| {
            let n = sizes.start() + i % span;
            random_geometric(n, 0.5, derive_seed(seed, i as u64, 1)).with_id(i)
        })
        .collect()
}
