use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SimError, StateVector};
use crate::graph::Graph;
use crate::parallel::*;

/// How the Ising energy of a basis state is read off its bits.
///
/// `Occupation` uses the bit values `b ∈ {0, 1}`:
/// `E = Σ J_ij b_i b_j + Σ h_i b_i`. This is the convention of the closed-form
/// Ramsey traces and of the Rydberg `n_i n_j` interaction.
///
/// `PauliZ` uses `z = 1 - 2b ∈ {+1, -1}` (`|0⟩ ↔ +1`):
/// `E = Σ J_ij z_i z_j + Σ h_i z_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyConvention {
    #[default]
    Occupation,
    PauliZ,
}

/// Diagonal of the Ising Hamiltonian of `graph` (weights and fields included).
pub fn diagonal_energies(graph: &Graph, convention: EnergyConvention) -> Vec<f64> {
    let n = graph.num_nodes();
    let edges: Vec<(usize, usize, f64)> = graph.weighted_edges().collect();
    let fields: Vec<(usize, f64)> = (0..n)
        .map(|i| (i, graph.field(i)))
        .filter(|&(_, h)| h != 0.0)
        .collect();
    let mut energies = vec![0.0; 1usize << n];
    energies
        .par_chunks_mut(CHUNK)
        .enumerate()
        .for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (k, e) in chunk.iter_mut().enumerate() {
                let sigma = base + k;
                let bit = |i: usize| (sigma >> i) & 1;
                *e = match convention {
                    EnergyConvention::Occupation => {
                        let pair: f64 = edges
                            .iter()
                            .filter(|&&(i, j, _)| bit(i) & bit(j) == 1)
                            .map(|&(_, _, w)| w)
                            .sum();
                        let single: f64 =
                            fields.iter().filter(|&&(i, _)| bit(i) == 1).map(|&(_, h)| h).sum();
                        pair + single
                    }
                    EnergyConvention::PauliZ => {
                        let z = |i: usize| 1.0 - 2.0 * bit(i) as f64;
                        let pair: f64 = edges.iter().map(|&(i, j, w)| w * z(i) * z(j)).sum();
                        let single: f64 = fields.iter().map(|&(i, h)| h * z(i)).sum();
                        pair + single
                    }
                };
            }
        });
    energies
}

/// Multiplies amplitude `σ` by `e^{-i E_σ t}`.
pub fn evolve_with_energies(
    state: &mut StateVector,
    energies: &[f64],
    t: f64,
) -> Result<(), SimError> {
    if energies.len() != state.dim() {
        return Err(SimError::SizeMismatch {
            state: state.n_qubits(),
            graph: energies.len().trailing_zeros() as usize,
        });
    }
    if t == 0.0 {
        return Ok(());
    }
    state
        .amplitudes_mut()
        .par_chunks_mut(CHUNK)
        .zip(energies.par_chunks(CHUNK))
        .for_each(|(amps, es)| {
            for (a, &e) in amps.iter_mut().zip(es) {
                *a *= Complex64::from_polar(1.0, -e * t);
            }
        });
    Ok(())
}

/// Free evolution under the graph's Ising Hamiltonian (occupation convention).
pub fn evolve_diagonal(state: &mut StateVector, graph: &Graph, t: f64) -> Result<(), SimError> {
    if state.n_qubits() != graph.num_nodes() {
        return Err(SimError::SizeMismatch {
            state: state.n_qubits(),
            graph: graph.num_nodes(),
        });
    }
    let energies = diagonal_energies(graph, EnergyConvention::Occupation);
    evolve_with_energies(state, &energies, t)
}
