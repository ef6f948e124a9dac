//! Exact statevector simulation of layered graph dynamics.
//!
//! Basis state `σ` is the integer whose bit `i` is the state of qubit `i`;
//! `|0⟩` is the empty (ground) state and `|1⟩` the occupied one.

mod diagonal;
mod hamiltonian;
mod hardware;
mod krylov;
mod pulse;
mod sequence;
mod state;

use thiserror::Error;

pub use diagonal::{diagonal_energies, evolve_diagonal, evolve_with_energies, EnergyConvention};
pub use hamiltonian::{HamiltonianSpec, SparseHamiltonian};
pub use hardware::{
    hardware_energies, rydberg_couplings, run_hardware_sequence, HardwareConfig, HardwareDurations,
};
pub use krylov::{evolve_sparse, evolve_sparse_with, KrylovConfig, KrylovStats};
pub use pulse::{apply_global_pulse, pulse_matrix};
pub use sequence::{run_sequence, run_sequence_with, EvolutionKind, PulseSequence, SimConfig};
pub use state::{initial_state, StateVector, DEFAULT_MAX_QUBITS};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{requested} qubits requested, budget is {max}")]
    QubitBudget { requested: usize, max: usize },
    #[error("state has {state} qubits but the graph has {graph} nodes")]
    SizeMismatch { state: usize, graph: usize },
    #[error("amplitude vector length {0} is not a power of two")]
    BadDimension(usize),
    #[error("Krylov propagation did not converge within {steps} sub-steps (t remaining {remaining})")]
    NonConvergence { steps: usize, remaining: f64 },
    #[error("invalid pulse sequence: {0}")]
    InvalidSequence(String),
    #[error("hardware constraint violated: {0}")]
    Hardware(String),
}
