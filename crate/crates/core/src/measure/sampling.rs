use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{BinningSpec, MeasureError, Observable, ProbabilityDistribution};
use crate::graph::Graph;
use crate::parallel::*;
use crate::sim::StateVector;

/// Shots drawn from one random stream. Chunk `c` uses stream `c` of the seed,
/// so samples do not depend on the number of worker threads.
pub const SHOT_CHUNK: usize = 1024;

/// Seed offset separating the noise streams from the shot streams.
const NOISE_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Independent per-bit detection errors: `0 → 1` with probability `epsilon`,
/// `1 → 0` with probability `epsilon_prime`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseModel {
    pub epsilon: f64,
    pub epsilon_prime: f64,
}

impl NoiseModel {
    pub const NONE: Self = Self {
        epsilon: 0.0,
        epsilon_prime: 0.0,
    };

    pub fn new(epsilon: f64, epsilon_prime: f64) -> Result<Self, MeasureError> {
        let m = Self {
            epsilon,
            epsilon_prime,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), MeasureError> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if ok(self.epsilon) && ok(self.epsilon_prime) {
            Ok(())
        } else {
            Err(MeasureError::InvalidNoise(self.epsilon, self.epsilon_prime))
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.epsilon == 0.0 && self.epsilon_prime == 0.0
    }
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Draws `shots` basis states from `|ψ|²` and passes them through `noise`.
pub fn sample_bitstrings(
    state: &StateVector,
    shots: usize,
    noise: NoiseModel,
    seed: u64,
) -> Result<Vec<u64>, MeasureError> {
    noise.validate()?;
    if shots == 0 {
        return Err(MeasureError::EmptySamples);
    }
    let mut cdf: Vec<f64> = state
        .amplitudes()
        .iter()
        .scan(0.0, |acc, a| {
            *acc += a.norm_sqr();
            Some(*acc)
        })
        .collect();
    let total = *cdf.last().expect("state vectors are never empty");
    cdf.iter_mut().for_each(|c| *c /= total);
    let last = cdf.len() - 1;

    let mut samples = vec![0u64; shots];
    samples
        .par_chunks_mut(SHOT_CHUNK)
        .enumerate()
        .for_each(|(c, out)| {
            let mut rng = chunk_rng(seed, c);
            for s in out.iter_mut() {
                let u: f64 = rng.random();
                *s = cdf.partition_point(|&x| x <= u).min(last) as u64;
            }
        });
    apply_detection_noise(&mut samples, state.n_qubits(), noise, seed ^ NOISE_SEED_SALT)?;
    Ok(samples)
}

/// Flips bits of `samples` in place according to `noise`. Noiseless models
/// leave the samples untouched.
pub fn apply_detection_noise(
    samples: &mut [u64],
    n_qubits: usize,
    noise: NoiseModel,
    seed: u64,
) -> Result<(), MeasureError> {
    noise.validate()?;
    if noise.is_noiseless() {
        return Ok(());
    }
    samples
        .par_chunks_mut(SHOT_CHUNK)
        .enumerate()
        .for_each(|(c, out)| {
            let mut rng = chunk_rng(seed, c);
            for s in out.iter_mut() {
                for q in 0..n_qubits {
                    let u: f64 = rng.random();
                    let p = if *s >> q & 1 == 1 {
                        noise.epsilon_prime
                    } else {
                        noise.epsilon
                    };
                    if u < p {
                        *s ^= 1 << q;
                    }
                }
            }
        });
    Ok(())
}

/// Empirical bin frequencies of `obs` over `samples`.
pub fn histogram_from_samples(
    samples: &[u64],
    graph: &Graph,
    obs: Observable,
    binning: &BinningSpec,
) -> Result<ProbabilityDistribution, MeasureError> {
    if samples.is_empty() {
        return Err(MeasureError::EmptySamples);
    }
    binning.validate()?;
    let mut counts: BTreeMap<i64, f64> = BTreeMap::new();
    for &s in samples {
        *counts.entry(binning.bin_of(obs.value(graph, s))).or_insert(0.0) += 1.0;
    }
    ProbabilityDistribution::from_weights(counts)
}

/// One line per sample, qubit 0 leftmost.
pub fn format_bitstrings(samples: &[u64], n_qubits: usize) -> String {
    let mut out = String::with_capacity(samples.len() * (n_qubits + 1));
    for &s in samples {
        for q in 0..n_qubits {
            out.push(if s >> q & 1 == 1 { '1' } else { '0' });
        }
        let _ = writeln!(out);
    }
    out
}

/// Inverse of [`format_bitstrings`]; returns the qubit count and the samples.
pub fn parse_bitstrings(text: &str) -> Result<(usize, Vec<u64>), MeasureError> {
    let mut width = None;
    let mut samples = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| MeasureError::Parse {
            line: k + 1,
            message,
        };
        if line.len() > 64 {
            return Err(err(format!("{} characters exceed 64 qubits", line.len())));
        }
        match width {
            None => width = Some(line.len()),
            Some(w) if w != line.len() => {
                return Err(err(format!("expected {w} characters, got {}", line.len())))
            }
            _ => {}
        }
        let mut s = 0u64;
        for (q, ch) in line.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => s |= 1 << q,
                other => return Err(err(format!("unexpected character {other:?}"))),
            }
        }
        samples.push(s);
    }
    Ok((width.unwrap_or(0), samples))
}
