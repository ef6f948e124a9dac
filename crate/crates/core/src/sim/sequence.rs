use serde::{Deserialize, Serialize};

use super::{
    apply_global_pulse, diagonal_energies, evolve_sparse_with, evolve_with_energies,
    EnergyConvention, HamiltonianSpec, KrylovConfig, SimError, SparseHamiltonian, StateVector,
    DEFAULT_MAX_QUBITS,
};
use crate::graph::Graph;

/// Layered sequence `{θ_0, t_1, θ_1, …, t_p, θ_p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    thetas: Vec<f64>,
    times: Vec<f64>,
}

impl PulseSequence {
    /// `thetas.len()` must be `times.len() + 1`; times must be finite and non-negative.
    pub fn new(thetas: Vec<f64>, times: Vec<f64>) -> Result<Self, SimError> {
        if thetas.len() != times.len() + 1 {
            return Err(SimError::InvalidSequence(format!(
                "{} pulse angles for {} free evolutions",
                thetas.len(),
                times.len()
            )));
        }
        if let Some(t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(SimError::InvalidSequence(format!("free time {t} is negative or non-finite")));
        }
        if let Some(th) = thetas.iter().find(|t| !t.is_finite()) {
            return Err(SimError::InvalidSequence(format!("pulse angle {th} is non-finite")));
        }
        Ok(Self { thetas, times })
    }

    /// `{ϑ, t, −ϑ}`.
    pub fn ramsey(theta: f64, t: f64) -> Result<Self, SimError> {
        Self::new(vec![theta, -theta], vec![t])
    }

    /// Parses the interleaved form `[θ_0, t_1, θ_1, …, t_p, θ_p]`.
    pub fn from_flat(values: &[f64]) -> Result<Self, SimError> {
        if values.len() % 2 == 0 {
            return Err(SimError::InvalidSequence(format!(
                "interleaved sequence needs an odd length, got {}",
                values.len()
            )));
        }
        let thetas = values.iter().step_by(2).copied().collect();
        let times = values.iter().skip(1).step_by(2).copied().collect();
        Self::new(thetas, times)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.thetas.len() + self.times.len());
        for (k, th) in self.thetas.iter().enumerate() {
            if k > 0 {
                out.push(self.times[k - 1]);
            }
            out.push(*th);
        }
        out
    }

    /// Number of layers `p`.
    pub fn depth(&self) -> usize {
        self.times.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Free-evolution Hamiltonian between pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionKind {
    #[default]
    Ising,
    #[serde(rename = "xy")]
    XY,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub max_qubits: usize,
    pub convention: EnergyConvention,
    pub krylov: KrylovConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            max_qubits: DEFAULT_MAX_QUBITS,
            convention: EnergyConvention::default(),
            krylov: KrylovConfig::default(),
        }
    }
}

/// Runs `seq` from `|0…0⟩` with default settings.
pub fn run_sequence(
    graph: &Graph,
    seq: &PulseSequence,
    kind: EvolutionKind,
) -> Result<StateVector, SimError> {
    run_sequence_with(graph, seq, kind, &SimConfig::default())
}

pub fn run_sequence_with(
    graph: &Graph,
    seq: &PulseSequence,
    kind: EvolutionKind,
    cfg: &SimConfig,
) -> Result<StateVector, SimError> {
    let n = graph.num_nodes();
    let mut state = StateVector::zero_state(n, cfg.max_qubits)?;
    apply_global_pulse(&mut state, seq.thetas[0]);
    match kind {
        EvolutionKind::Ising => {
            let energies = diagonal_energies(graph, cfg.convention);
            for (t, th) in seq.times.iter().zip(&seq.thetas[1..]) {
                evolve_with_energies(&mut state, &energies, *t)?;
                apply_global_pulse(&mut state, *th);
            }
        }
        EvolutionKind::XY => {
            let ham = SparseHamiltonian::new(HamiltonianSpec::XYGraph { graph })?;
            for (t, th) in seq.times.iter().zip(&seq.thetas[1..]) {
                evolve_sparse_with(&mut state, &ham, *t, &cfg.krylov)?;
                apply_global_pulse(&mut state, *th);
            }
        }
    }
    Ok(state)
}
