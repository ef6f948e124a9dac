use serde::{Deserialize, Serialize};

use super::derive_seed;
use crate::graph::Graph;
use crate::kernel::{kernel_matrix_with_ids, KernelMatrix};
use crate::measure::{
    exact_distribution, histogram_from_samples, sample_bitstrings, BinningSpec, NoiseModel, Observable,
    ProbabilityDistribution,
};
use crate::parallel::*;
use crate::sim::{
    run_hardware_sequence, run_sequence_with, EvolutionKind, HardwareConfig, HardwareDurations,
    PulseSequence, SimConfig, SimError, StateVector, DEFAULT_MAX_QUBITS,
};
use crate::Result;

/// How each graph's register is driven.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum EvolutionSpec {
    /// Global pulses alternating with graph-Hamiltonian evolution, given in
    /// the interleaved form `[θ_0, t_1, θ_1, …]`.
    Layered {
        #[serde(default)]
        kind: EvolutionKind,
        sequence: Vec<f64>,
    },
    /// Neutral-atom drive on the graph's node positions.
    Hardware {
        #[serde(default)]
        durations_ns: HardwareDurations,
        #[serde(default)]
        hardware: HardwareConfig,
    },
}

impl Default for EvolutionSpec {
    fn default() -> Self {
        EvolutionSpec::Layered {
            kind: EvolutionKind::Ising,
            sequence: vec![std::f64::consts::FRAC_PI_4, 1.0, -std::f64::consts::FRAC_PI_4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub evolution: EvolutionSpec,
    pub observable: Observable,
    pub binning: BinningSpec,
    /// Exact distributions when absent.
    pub shots: Option<usize>,
    pub noise: NoiseModel,
    pub seed: u64,
    pub max_qubits: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            evolution: EvolutionSpec::default(),
            observable: Observable::default(),
            binning: BinningSpec::default(),
            shots: None,
            noise: NoiseModel::NONE,
            seed: 0,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

/// Final state of `graph` under `evolution`.
pub fn evolve_graph(graph: &Graph, evolution: &EvolutionSpec, max_qubits: usize) -> Result<StateVector> {
    Ok(match evolution {
        EvolutionSpec::Layered { kind, sequence } => {
            let seq = PulseSequence::from_flat(sequence)?;
            let sim = SimConfig {
                max_qubits,
                ..SimConfig::default()
            };
            run_sequence_with(graph, &seq, *kind, &sim)?
        }
        EvolutionSpec::Hardware {
            durations_ns,
            hardware,
        } => {
            let hw = HardwareConfig {
                max_qubits: max_qubits.min(hardware.max_qubits),
                ..hardware.clone()
            };
            run_hardware_sequence(graph, &hw, durations_ns)?
        }
    })
}

/// Exact or sampled outcome distribution of one graph; `seed` drives the shots.
pub fn graph_features(graph: &Graph, cfg: &FeatureConfig, seed: u64) -> Result<ProbabilityDistribution> {
    let state = evolve_graph(graph, &cfg.evolution, cfg.max_qubits)?;
    Ok(match cfg.shots {
        None => exact_distribution(&state, graph, cfg.observable, &cfg.binning)?,
        Some(shots) => {
            let samples = sample_bitstrings(&state, shots, cfg.noise, seed)?;
            histogram_from_samples(&samples, graph, cfg.observable, &cfg.binning)?
        }
    })
}

/// Distributions of the graphs that fit the qubit budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSet {
    /// Positions in the input slice of the graphs kept.
    pub indices: Vec<usize>,
    pub skipped: Vec<usize>,
    pub distributions: Vec<ProbabilityDistribution>,
}

/// Features for every graph in parallel; graph `i` samples with a seed
/// derived from `(cfg.seed, i)`. Graphs over the qubit budget are skipped.
pub fn compute_features(graphs: &[Graph], cfg: &FeatureConfig) -> Result<FeatureSet> {
    let results: Vec<Result<Option<ProbabilityDistribution>>> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| match graph_features(g, cfg, derive_seed(cfg.seed, i as u64, 0)) {
            Ok(d) => Ok(Some(d)),
            Err(crate::Error::Sim(SimError::QubitBudget { requested, max })) => {
                log::warn!("graph {i} skipped: {requested} qubits exceed the budget of {max}");
                Ok(None)
            }
            Err(e) => Err(e),
        })
        .collect();
    let mut out = FeatureSet {
        indices: Vec::new(),
        skipped: Vec::new(),
        distributions: Vec::new(),
    };
    for (i, r) in results.into_iter().enumerate() {
        match r? {
            Some(d) => {
                out.indices.push(i);
                out.distributions.push(d);
            }
            None => out.skipped.push(i),
        }
    }
    Ok(out)
}

/// QE Gram matrix over a feature set, rows labelled by input position.
pub fn feature_kernel(features: &FeatureSet, mu: f64) -> Result<KernelMatrix> {
    Ok(kernel_matrix_with_ids(
        &features.distributions,
        features.indices.clone(),
        mu,
    )?)
}
