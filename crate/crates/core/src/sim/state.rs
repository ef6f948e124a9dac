use num_complex::Complex64;

use super::SimError;
use crate::parallel::chunked_sum;

/// Default qubit budget; the benchmarks keep graphs with at most 16 nodes.
pub const DEFAULT_MAX_QUBITS: usize = 16;

/// Normalised amplitude vector over the `2^n` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// `|0…0⟩` on `n` qubits under the default budget.
pub fn initial_state(n: usize) -> Result<StateVector, SimError> {
    StateVector::zero_state(n, DEFAULT_MAX_QUBITS)
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits, `1 <= n <= max_qubits`.
    pub fn zero_state(n: usize, max_qubits: usize) -> Result<Self, SimError> {
        Self::basis(n, 0, max_qubits)
    }

    /// Computational basis state `index` on `n` qubits.
    pub fn basis(n: usize, index: usize, max_qubits: usize) -> Result<Self, SimError> {
        if n == 0 || n > max_qubits || n >= usize::BITS as usize {
            return Err(SimError::QubitBudget {
                requested: n,
                max: max_qubits,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    /// Wraps (and normalises) an amplitude vector whose length is a power of two.
    pub fn from_amplitudes(mut amps: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::BadDimension(len));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            amps.iter_mut().for_each(|a| *a /= norm);
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        let amps = &self.amps;
        chunked_sum(amps.len(), |r| amps[r].iter().map(|a| a.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// `|ψ_σ|²` for every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        let (a, b) = (&self.amps, &other.amps);
        chunked_sum(a.len(), |r| {
            a[r.clone()]
                .iter()
                .zip(&b[r])
                .map(|(x, y)| x.conj() * y)
                .sum::<Complex64>()
        })
    }

    /// Multiplies every amplitude by `e^{i phase}`.
    pub fn apply_global_phase(&mut self, phase: f64) {
        let p = Complex64::from_polar(1.0, phase);
        self.amps.iter_mut().for_each(|a| *a *= p);
    }
}
