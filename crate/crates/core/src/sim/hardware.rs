//! Neutral-atom pulse model: Rydberg `C6/R⁶` couplings between every pair of
//! atoms, a global transverse drive during mixing segments, and bare
//! interaction between them. Times are in nanoseconds at the API and
//! microseconds internally; energies are in rad/µs.

use serde::{Deserialize, Serialize};

use super::{
    evolve_sparse_with, evolve_with_energies, HamiltonianSpec, KrylovConfig, SimError,
    SparseHamiltonian, StateVector, DEFAULT_MAX_QUBITS,
};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HardwareConfig {
    /// Rabi frequency `Ω_0` in rad/µs.
    pub omega: f64,
    /// Detuning `δ` in rad/µs.
    pub delta: f64,
    /// Van der Waals coefficient in rad·µm⁶/µs.
    pub c6: f64,
    /// Dipolar coefficient for XY-type hardware. Not used by the Ising model.
    pub c3: Option<f64>,
    /// Positions are rescaled so the closest pair sits at this distance (µm).
    pub min_distance_um: f64,
    /// Every segment must be strictly longer than this (ns).
    pub min_duration_ns: f64,
    /// The whole sequence must be strictly shorter than this (ns).
    pub max_total_ns: f64,
    pub max_qubits: usize,
    pub krylov: KrylovConfig,
}

impl Default for HardwareConfig {
    fn default() -> Self {
        Self {
            omega: 15.0,
            delta: 0.0,
            c6: 5_420_503.0,
            c3: None,
            min_distance_um: 5.0,
            min_duration_ns: 4.0,
            max_total_ns: 500.0,
            max_qubits: DEFAULT_MAX_QUBITS,
            krylov: KrylovConfig::default(),
        }
    }
}

/// Segment durations `{τ_0, t_0, τ_1, t_1, …, τ_p}` in ns; even entries are
/// mixing segments, odd entries free evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HardwareDurations(pub Vec<f64>);

impl Default for HardwareDurations {
    fn default() -> Self {
        Self(vec![87.0, 32.0, 84.0, 54.0, 72.0])
    }
}

impl HardwareDurations {
    pub fn validate(&self, cfg: &HardwareConfig) -> Result<(), SimError> {
        let d = &self.0;
        if d.len() % 2 == 0 {
            return Err(SimError::Hardware(format!(
                "sequence must start and end with a mixing segment, got {} segments",
                d.len()
            )));
        }
        if let Some(x) = d.iter().find(|&&x| !(x > cfg.min_duration_ns) || !x.is_finite()) {
            return Err(SimError::Hardware(format!(
                "segment of {x} ns is not longer than {} ns",
                cfg.min_duration_ns
            )));
        }
        let total: f64 = d.iter().sum();
        if total >= cfg.max_total_ns {
            return Err(SimError::Hardware(format!(
                "total duration {total} ns is not below {} ns",
                cfg.max_total_ns
            )));
        }
        Ok(())
    }
}

/// `(i, j, C6 / R_ij⁶)` for every atom pair after rescaling the positions.
pub fn rydberg_couplings(
    graph: &Graph,
    cfg: &HardwareConfig,
) -> Result<Vec<(usize, usize, f64)>, SimError> {
    let pos = graph
        .positions()
        .ok_or_else(|| SimError::Hardware("graph has no node positions".into()))?;
    let n = pos.len();
    let dist = |i: usize, j: usize| {
        let (a, b) = (pos[i], pos[j]);
        (a[0] - b[0]).hypot(a[1] - b[1])
    };
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    let mut dmin = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(i, j);
            dmin = dmin.min(d);
            pairs.push((i, j, d));
        }
    }
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    if !(dmin > 0.0) || !dmin.is_finite() {
        return Err(SimError::Hardware("two atoms share a position".into()));
    }
    let scale = cfg.min_distance_um / dmin;
    Ok(pairs
        .into_iter()
        .map(|(i, j, d)| (i, j, cfg.c6 / (d * scale).powi(6)))
        .collect())
}

/// Diagonal of `Σ_{i<j} C6/R⁶ n_i n_j − δ Σ n_i`.
pub fn hardware_energies(graph: &Graph, cfg: &HardwareConfig) -> Result<Vec<f64>, SimError> {
    let n = graph.num_nodes();
    if n > cfg.max_qubits {
        return Err(SimError::QubitBudget {
            requested: n,
            max: cfg.max_qubits,
        });
    }
    let couplings = rydberg_couplings(graph, cfg)?;
    let mut energies = vec![0.0; 1usize << n];
    for (s, e) in energies.iter_mut().enumerate() {
        let occupied = |i: usize| s >> i & 1 == 1;
        let pair: f64 = couplings
            .iter()
            .filter(|&&(i, j, _)| occupied(i) && occupied(j))
            .map(|c| c.2)
            .sum();
        *e = pair - cfg.delta * s.count_ones() as f64;
    }
    Ok(energies)
}

/// Runs the alternating mixing/free sequence from `|0…0⟩`.
pub fn run_hardware_sequence(
    graph: &Graph,
    cfg: &HardwareConfig,
    durations: &HardwareDurations,
) -> Result<StateVector, SimError> {
    durations.validate(cfg)?;
    let mixing = SparseHamiltonian::new(HamiltonianSpec::HardwareDrive { graph, config: cfg })?;
    let energies = hardware_energies(graph, cfg)?;
    let mut state = StateVector::zero_state(graph.num_nodes(), cfg.max_qubits)?;
    for (k, &ns) in durations.0.iter().enumerate() {
        let us = ns * 1e-3;
        if k % 2 == 0 {
            evolve_sparse_with(&mut state, &mixing, us, &cfg.krylov)?;
        } else {
            evolve_with_energies(&mut state, &energies, us)?;
        }
    }
    Ok(state)
}
