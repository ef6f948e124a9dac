use num_complex::Complex64;

use super::hardware::{hardware_energies, HardwareConfig};
use super::{diagonal_energies, EnergyConvention, SimError};
use crate::graph::Graph;
use crate::parallel::*;

/// Hamiltonians that [`SparseHamiltonian`] can represent.
#[derive(Debug, Clone, Copy)]
pub enum HamiltonianSpec<'a> {
    /// Diagonal Ising energies of the graph.
    IsingGraph {
        graph: &'a Graph,
        convention: EnergyConvention,
    },
    /// `Σ_{(i,j)} J_ij (σ⁺_i σ⁻_j + h.c.) + Σ_i h_i n_i`.
    XYGraph { graph: &'a Graph },
    /// `amplitude · Σ_i σ^y_i`; evolving for unit time is a global pulse of angle `amplitude`.
    GlobalY { n_qubits: usize, amplitude: f64 },
    /// Rydberg interaction over all atom pairs plus `(Ω/2)Σσ^x − δΣn`.
    HardwareDrive {
        graph: &'a Graph,
        config: &'a HardwareConfig,
    },
}

/// Matrix-free Hamiltonian: a diagonal plus particle hops and uniform
/// transverse drives.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    n_qubits: usize,
    diag: Option<Vec<f64>>,
    hops: Vec<(usize, f64)>,
    x_drive: f64,
    y_drive: f64,
}

impl SparseHamiltonian {
    pub fn new(spec: HamiltonianSpec<'_>) -> Result<Self, SimError> {
        let empty = |n| Self {
            n_qubits: n,
            diag: None,
            hops: Vec::new(),
            x_drive: 0.0,
            y_drive: 0.0,
        };
        Ok(match spec {
            HamiltonianSpec::IsingGraph { graph, convention } => Self {
                diag: Some(diagonal_energies(graph, convention)),
                ..empty(graph.num_nodes())
            },
            HamiltonianSpec::XYGraph { graph } => {
                let n = graph.num_nodes();
                let has_fields = (0..n).any(|i| graph.field(i) != 0.0);
                Self {
                    diag: has_fields.then(|| field_energies(graph)),
                    hops: graph
                        .weighted_edges()
                        .map(|(i, j, w)| ((1usize << i) | (1usize << j), w))
                        .collect(),
                    ..empty(n)
                }
            }
            HamiltonianSpec::GlobalY {
                n_qubits,
                amplitude,
            } => Self {
                y_drive: amplitude,
                ..empty(n_qubits)
            },
            HamiltonianSpec::HardwareDrive { graph, config } => Self {
                diag: Some(hardware_energies(graph, config)?),
                x_drive: config.omega / 2.0,
                ..empty(graph.num_nodes())
            },
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Whether total occupation commutes with this Hamiltonian.
    pub fn conserves_occupation(&self) -> bool {
        self.x_drive == 0.0 && self.y_drive == 0.0
    }

    /// Upper bound on the spectral radius (Gershgorin).
    pub fn norm_bound(&self) -> f64 {
        let d = self
            .diag
            .as_ref()
            .map_or(0.0, |d| d.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        let hop: f64 = self.hops.iter().map(|h| h.1.abs()).sum();
        d + hop + self.n_qubits as f64 * (self.x_drive.abs() + self.y_drive.abs())
    }

    /// `out = H psi`.
    pub fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(psi.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        let n = self.n_qubits;
        let x = self.x_drive;
        let y = self.y_drive;
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * CHUNK;
            for (k, o) in chunk.iter_mut().enumerate() {
                let s = base + k;
                let mut acc = match &self.diag {
                    Some(d) => psi[s] * d[s],
                    None => Complex64::new(0.0, 0.0),
                };
                for &(mask, w) in &self.hops {
                    let b = s & mask;
                    if b != 0 && b != mask {
                        acc += psi[s ^ mask] * w;
                    }
                }
                if x != 0.0 {
                    for q in 0..n {
                        acc += psi[s ^ (1 << q)] * x;
                    }
                }
                if y != 0.0 {
                    for q in 0..n {
                        let a = psi[s ^ (1 << q)] * y;
                        // σ^y: ⟨1|σ^y|0⟩ = i, ⟨0|σ^y|1⟩ = -i
                        acc += if s >> q & 1 == 1 {
                            Complex64::new(-a.im, a.re)
                        } else {
                            Complex64::new(a.im, -a.re)
                        };
                    }
                }
                *o = acc;
            }
        });
    }
}

fn field_energies(graph: &Graph) -> Vec<f64> {
    let n = graph.num_nodes();
    (0..1usize << n)
        .map(|s| (0..n).filter(|&i| s >> i & 1 == 1).map(|i| graph.field(i)).sum())
        .collect()
}
