//! Lanczos propagator for `e^{-iHt}|ψ⟩` with adaptive sub-stepping.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SimError, SparseHamiltonian, StateVector};
use crate::parallel::*;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KrylovConfig {
    /// Krylov subspace dimension.
    pub dim: usize,
    /// Error budget over the whole propagation interval.
    pub tol: f64,
    /// Cap on accepted plus rejected sub-steps.
    pub max_substeps: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self {
            dim: 30,
            tol: 1e-10,
            max_substeps: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KrylovStats {
    pub accepted: usize,
    pub rejected: usize,
    pub matvecs: usize,
}

/// `ψ ← e^{-iHt}ψ` with the default subspace size and the given tolerance.
pub fn evolve_sparse(
    state: &mut StateVector,
    ham: &SparseHamiltonian,
    t: f64,
    tol: f64,
) -> Result<(), SimError> {
    let cfg = KrylovConfig {
        tol,
        ..KrylovConfig::default()
    };
    evolve_sparse_with(state, ham, t, &cfg).map(|_| ())
}

pub fn evolve_sparse_with(
    state: &mut StateVector,
    ham: &SparseHamiltonian,
    t: f64,
    cfg: &KrylovConfig,
) -> Result<KrylovStats, SimError> {
    if state.n_qubits() != ham.n_qubits() {
        return Err(SimError::SizeMismatch {
            state: state.n_qubits(),
            graph: ham.n_qubits(),
        });
    }
    let mut stats = KrylovStats::default();
    if t == 0.0 {
        return Ok(stats);
    }
    let dim = state.dim();
    let m_max = cfg.dim.clamp(2, dim);
    let sign = t.signum();
    let total = t.abs();
    let mut remaining = total;
    let mut tau = total;
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_max);
    let mut w = vec![Complex64::default(); dim];

    while remaining > total * 1e-14 {
        let psi = state.amplitudes_mut();
        let beta0 = norm(psi);
        if beta0 == 0.0 {
            break;
        }
        let lz = lanczos(ham, psi, beta0, m_max, &mut basis, &mut w, &mut stats);
        let m = lz.alpha.len();
        let eig = tridiagonal_eigen(&lz.alpha, &lz.beta[..m - 1]);

        let y = loop {
            tau = tau.min(remaining);
            let y = exp_e1(&eig, sign * tau);
            let err = match lz.residual {
                Some(b) => beta0 * b * y[m - 1].norm(),
                None => 0.0,
            };
            if err <= cfg.tol * tau / total {
                break y;
            }
            stats.rejected += 1;
            if stats.accepted + stats.rejected > cfg.max_substeps {
                return Err(SimError::NonConvergence {
                    steps: cfg.max_substeps,
                    remaining,
                });
            }
            tau *= 0.5;
        };

        psi.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
            let base = c * CHUNK;
            for (k, o) in out.iter_mut().enumerate() {
                let mut acc = Complex64::default();
                for (v, yj) in basis.iter().zip(&y) {
                    acc += v[base + k] * yj;
                }
                *o = acc * beta0;
            }
        });
        stats.accepted += 1;
        if stats.accepted + stats.rejected > cfg.max_substeps {
            return Err(SimError::NonConvergence {
                steps: cfg.max_substeps,
                remaining: remaining - tau,
            });
        }
        remaining -= tau;
        tau *= 1.5;
    }
    Ok(stats)
}

struct Lanczos {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// `β_m` of a full-length run; `None` after an invariant subspace was found.
    residual: Option<f64>,
}

fn lanczos(
    ham: &SparseHamiltonian,
    psi: &[Complex64],
    beta0: f64,
    m_max: usize,
    basis: &mut Vec<Vec<Complex64>>,
    w: &mut [Complex64],
    stats: &mut KrylovStats,
) -> Lanczos {
    let mut v0 = match basis.pop() {
        Some(v) => v,
        None => vec![Complex64::default(); psi.len()],
    };
    // keep earlier buffers around for reuse
    let mut spare: Vec<Vec<Complex64>> = std::mem::take(basis);
    v0.iter_mut().zip(psi).for_each(|(v, p)| *v = p / beta0);
    basis.push(v0);

    let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
    let mut beta: Vec<f64> = Vec::with_capacity(m_max);
    let mut scale = 0.0f64;
    for j in 0..m_max {
        ham.apply(&basis[j], w);
        stats.matvecs += 1;
        let a = dot(&basis[j], w).re;
        alpha.push(a);
        axpy(w, -a, &basis[j]);
        if j > 0 {
            axpy(w, -beta[j - 1], &basis[j - 1]);
        }
        for v in basis.iter() {
            let c = dot(v, w);
            axpy_c(w, -c, v);
        }
        let b = norm(w);
        scale = scale.max(a.abs()).max(b);
        if b <= 1e-13 * scale.max(1e-300) {
            return Lanczos {
                alpha,
                beta,
                residual: None,
            };
        }
        beta.push(b);
        if j + 1 == m_max {
            break;
        }
        let mut next = spare
            .pop()
            .unwrap_or_else(|| vec![Complex64::default(); psi.len()]);
        next.iter_mut().zip(w.iter()).for_each(|(n, x)| *n = x / b);
        basis.push(next);
    }
    let residual = beta.last().copied();
    Lanczos {
        alpha,
        beta,
        residual,
    }
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    SymmetricEigen::new(t)
}

/// `exp(-i T s) e_1` from the eigendecomposition of `T`.
fn exp_e1(eig: &SymmetricEigen<f64, nalgebra::Dyn>, s: f64) -> Vec<Complex64> {
    let q = &eig.eigenvectors;
    let m = q.nrows();
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(l, &lam)| Complex64::from_polar(q[(0, l)], -lam * s))
        .collect();
    (0..m)
        .map(|k| (0..m).map(|l| phases[l] * q[(k, l)]).sum())
        .collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    chunked_sum(a.len(), |r| {
        a[r.clone()]
            .iter()
            .zip(&b[r])
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex64>()
    })
}

fn norm(a: &[Complex64]) -> f64 {
    chunked_sum(a.len(), |r| a[r].iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt()
}

fn axpy(y: &mut [Complex64], a: f64, x: &[Complex64]) {
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(ys, xs)| ys.iter_mut().zip(xs).for_each(|(y, x)| *y += x * a));
}

fn axpy_c(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(ys, xs)| ys.iter_mut().zip(xs).for_each(|(y, x)| *y += x * a));
}
