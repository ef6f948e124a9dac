//! Observables, outcome distributions, shot sampling and detection noise.

mod distribution;
mod fourier;
mod sampling;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::sim::{diagonal_energies, EnergyConvention, StateVector};

pub use distribution::{BinningSpec, ProbabilityDistribution};
pub use fourier::{fourier_distribution, DEGENERATE_TOL};
pub use sampling::{
    apply_detection_noise, format_bitstrings, histogram_from_samples, parse_bitstrings,
    sample_bitstrings, NoiseModel, SHOT_CHUNK,
};

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("state has {state} qubits but the graph has {graph} nodes")]
    SizeMismatch { state: usize, graph: usize },
    #[error("no samples to histogram")]
    EmptySamples,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("noise rates must lie in [0, 1], got ({0}, {1})")]
    InvalidNoise(f64, f64),
    #[error("invalid binning: {0}")]
    InvalidBinning(String),
    #[error("{samples} trace samples cannot resolve {components} Fourier components (need {needed})")]
    GridTooCoarse {
        samples: usize,
        components: usize,
        needed: usize,
    },
    #[error("bitstring dump line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Diagonal observable measured in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    /// `Σ_{(i,j)} J_ij b_i b_j + Σ_i h_i b_i` over bit values.
    #[default]
    IsingEnergy,
    /// `Σ_i n_i`.
    TotalOccupation,
    /// `n_i`.
    SiteOccupation(usize),
}

impl Observable {
    /// Value on basis state `sigma`.
    pub fn value(&self, graph: &Graph, sigma: u64) -> f64 {
        let bit = |i: usize| sigma >> i & 1 == 1;
        match *self {
            Observable::IsingEnergy => {
                let pair: f64 = graph
                    .weighted_edges()
                    .filter(|&(i, j, _)| bit(i) && bit(j))
                    .map(|e| e.2)
                    .sum();
                let single: f64 = (0..graph.num_nodes())
                    .filter(|&i| bit(i))
                    .map(|i| graph.field(i))
                    .sum();
                pair + single
            }
            Observable::TotalOccupation => sigma.count_ones() as f64,
            Observable::SiteOccupation(i) => f64::from(u8::from(bit(i))),
        }
    }

    /// Values on all `2^N` basis states.
    pub fn values(&self, graph: &Graph) -> Vec<f64> {
        let n = graph.num_nodes();
        match *self {
            Observable::IsingEnergy => diagonal_energies(graph, EnergyConvention::Occupation),
            Observable::TotalOccupation => {
                (0..1u64 << n).map(|s| s.count_ones() as f64).collect()
            }
            Observable::SiteOccupation(i) => {
                (0..1u64 << n).map(|s| (s >> i & 1) as f64).collect()
            }
        }
    }

    /// Whether every outcome is an integer for this graph.
    pub fn is_integral(&self, graph: &Graph) -> bool {
        match self {
            Observable::IsingEnergy => !graph.is_weighted(),
            _ => true,
        }
    }
}

fn check_size(state: &StateVector, graph: &Graph) -> Result<(), MeasureError> {
    if state.n_qubits() != graph.num_nodes() {
        return Err(MeasureError::SizeMismatch {
            state: state.n_qubits(),
            graph: graph.num_nodes(),
        });
    }
    Ok(())
}

/// Bins whose total probability falls below this are dropped from exact
/// distributions; they only carry rounding residue such as `cos(π/2)²`.
pub const PROBABILITY_FLOOR: f64 = 1e-20;

/// Outcome distribution of `obs` on `state`; degenerate outcomes share a bin.
pub fn exact_distribution(
    state: &StateVector,
    graph: &Graph,
    obs: Observable,
    binning: &BinningSpec,
) -> Result<ProbabilityDistribution, MeasureError> {
    check_size(state, graph)?;
    binning.validate()?;
    let values = obs.values(graph);
    let mut acc: BTreeMap<i64, f64> = BTreeMap::new();
    for (a, v) in state.amplitudes().iter().zip(&values) {
        let p = a.norm_sqr();
        if p > 0.0 {
            *acc.entry(binning.bin_of(*v)).or_insert(0.0) += p;
        }
    }
    acc.retain(|_, p| *p >= PROBABILITY_FLOOR);
    ProbabilityDistribution::from_weights(acc)
}

/// `Σ_σ |ψ_σ|² value(σ)`.
pub fn expectation(state: &StateVector, graph: &Graph, obs: Observable) -> Result<f64, MeasureError> {
    check_size(state, graph)?;
    let values = obs.values(graph);
    Ok(state
        .amplitudes()
        .iter()
        .zip(&values)
        .map(|(a, v)| a.norm_sqr() * v)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{apply_global_pulse, initial_state};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn ground_and_full_states() {
        let g = Graph::cycle(5);
        let mut s = initial_state(5).unwrap();
        let d = exact_distribution(&s, &g, Observable::IsingEnergy, &BinningSpec::Integer).unwrap();
        assert_eq!(d.bins(), &[0]);
        apply_global_pulse(&mut s, FRAC_PI_2);
        let d = exact_distribution(&s, &g, Observable::IsingEnergy, &BinningSpec::Integer).unwrap();
        assert_eq!(d.bins(), &[5]);
        assert!((d.probs()[0] - 1.0).abs() < 1e-12);
        assert!((expectation(&s, &g, Observable::TotalOccupation).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_superposition_on_an_edge() {
        let g = Graph::path(2);
        let mut s = initial_state(2).unwrap();
        apply_global_pulse(&mut s, FRAC_PI_4);
        let d = exact_distribution(&s, &g, Observable::IsingEnergy, &BinningSpec::Integer).unwrap();
        assert_eq!(d.bins(), &[0, 1]);
        assert!((d.probs()[0] - 0.75).abs() < 1e-12);
        assert!((d.probs()[1] - 0.25).abs() < 1e-12);
        let n = expectation(&s, &g, Observable::TotalOccupation).unwrap();
        assert!((n - 1.0).abs() < 1e-12);
        let site = expectation(&s, &g, Observable::SiteOccupation(1)).unwrap();
        assert!((site - 0.5).abs() < 1e-12);
    }

    #[test]
    fn expectation_matches_binned_mean() {
        let g = Graph::star(5);
        let mut s = initial_state(5).unwrap();
        apply_global_pulse(&mut s, 0.6);
        let d = exact_distribution(&s, &g, Observable::IsingEnergy, &BinningSpec::Integer).unwrap();
        let mean: f64 = d.bins().iter().zip(d.probs()).map(|(b, p)| *b as f64 * p).sum();
        let e = expectation(&s, &g, Observable::IsingEnergy).unwrap();
        assert!((mean - e).abs() < 1e-12);
    }

    #[test]
    fn global_phase_invariance() {
        let g = Graph::complete(4);
        let mut s = initial_state(4).unwrap();
        apply_global_pulse(&mut s, 0.4);
        let a = exact_distribution(&s, &g, Observable::IsingEnergy, &BinningSpec::Integer).unwrap();
        s.apply_global_phase(1.234);
        let b = exact_distribution(&s, &g, Observable::IsingEnergy, &BinningSpec::Integer).unwrap();
        assert_eq!(a.bins(), b.bins());
        for (x, y) in a.probs().iter().zip(b.probs()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn size_mismatch() {
        let s = initial_state(3).unwrap();
        assert!(matches!(
            expectation(&s, &Graph::path(4), Observable::TotalOccupation),
            Err(MeasureError::SizeMismatch { .. })
        ));
    }
}
