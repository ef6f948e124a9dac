use num_complex::Complex64;

use super::StateVector;
use crate::parallel::*;

/// Single-qubit factor `cos ϑ·1 + sin ϑ(σ⁺ − σ⁻)` in the `(|0⟩, |1⟩)` basis,
/// i.e. `e^{-iϑσ^y}`.
pub fn pulse_matrix(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

/// Applies the same rotation `pulse_matrix(theta)` to every qubit.
pub fn apply_global_pulse(state: &mut StateVector, theta: f64) {
    if theta == 0.0 {
        return;
    }
    let m = pulse_matrix(theta);
    for q in 0..state.n_qubits() {
        apply_real_1q(state.amplitudes_mut(), q, m);
    }
}

fn apply_real_1q(amps: &mut [Complex64], q: usize, m: [[f64; 2]; 2]) {
    let stride = 1usize << q;
    let rotate = |lo: &mut [Complex64], hi: &mut [Complex64]| {
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = x * m[0][0] + y * m[0][1];
            *b = x * m[1][0] + y * m[1][1];
        }
    };
    if 2 * stride <= CHUNK {
        amps.par_chunks_mut(CHUNK.min(amps.len())).for_each(|chunk| {
            for block in chunk.chunks_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                rotate(lo, hi);
            }
        });
    } else {
        for block in amps.chunks_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.par_chunks_mut(CHUNK)
                .zip(hi.par_chunks_mut(CHUNK))
                .for_each(|(l, h)| rotate(l, h));
        }
    }
}
