//! Closed forms for the depth-1 Ising Ramsey protocol `{ϑ, t, −ϑ}` measured
//! with the total occupation.
//!
//! With `c = cos ϑ`, `s = sin ϑ` and `m(κ)` the degree histogram,
//! `n(t) = 2c²s² Σ_κ m(κ) Re[1 − (c² + e^{it}s²)^κ]`, whose Fourier weights are
//! the dot products of `m` with the basis vectors built by
//! [`feature_basis_vectors`].

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{degree_histogram, Graph};
use crate::measure::{fourier_distribution, MeasureError, ProbabilityDistribution, DEGENERATE_TOL};

#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("closed form needs an unweighted graph without node fields; use occupation_trace_generic")]
    WeightedGraph,
    #[error("invalid Ramsey configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RamseyConfig {
    pub theta: f64,
    /// Number of Fourier components `K`; `None` means `max_degree + 1`.
    pub num_components: Option<usize>,
    pub period: f64,
    /// Grid size for the sampled-trace cross-check.
    pub time_samples: usize,
}

impl Default for RamseyConfig {
    fn default() -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_4,
            num_components: None,
            period: TAU,
            time_samples: 256,
        }
    }
}

impl RamseyConfig {
    pub fn new(theta: f64) -> Self {
        Self {
            theta,
            ..Self::default()
        }
    }

    pub fn with_components(mut self, k: usize) -> Self {
        self.num_components = Some(k);
        self
    }

    /// `K` for `graph`.
    pub fn components_for(&self, graph: &Graph) -> usize {
        self.num_components.unwrap_or(graph.max_degree() + 1)
    }

    pub fn validate(&self, k: usize) -> Result<(), AnalyticError> {
        let bad = |m: String| Err(AnalyticError::InvalidConfig(m));
        if !(0.0..=FRAC_PI_2 + 1e-12).contains(&self.theta) {
            return bad(format!("theta {} outside [0, π/2]", self.theta));
        }
        if k == 0 {
            return bad("at least one Fourier component is required".into());
        }
        if self.time_samples < 2 * k {
            return bad(format!("{} time samples for {k} components", self.time_samples));
        }
        if !(self.period > 0.0) {
            return bad(format!("period {} is not positive", self.period));
        }
        Ok(())
    }

    /// Uniform grid over `[0, T]`, endpoints included.
    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.time_samples.max(2);
        (0..n)
            .map(|j| self.period * j as f64 / (n - 1) as f64)
            .collect()
    }
}

fn require_plain(graph: &Graph) -> Result<(), AnalyticError> {
    if graph.is_weighted() {
        Err(AnalyticError::WeightedGraph)
    } else {
        Ok(())
    }
}

/// `⟨n̂⟩` after `{ϑ, t, −ϑ}` from `|0…0⟩`, from the degree histogram.
pub fn occupation_trace(graph: &Graph, theta: f64, t: f64) -> Result<f64, AnalyticError> {
    require_plain(graph)?;
    let (s, c) = theta.sin_cos();
    let (c2, s2) = (c * c, s * s);
    let z = Complex64::new(c2, 0.0) + Complex64::from_polar(s2, t);
    let hist = degree_histogram(graph);
    let sum: f64 = hist
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(kappa, &m)| m as f64 * (1.0 - z.powu(kappa as u32).re))
        .sum();
    Ok(2.0 * c2 * s2 * sum)
}

/// Rows `V_0 … V_{K−1}`, each indexed by degree `κ = 0..=max_degree`.
pub fn feature_basis_vectors(theta: f64, max_degree: usize, k: usize) -> Vec<Vec<f64>> {
    let (s, c) = theta.sin_cos();
    let (c2, s2) = (c * c, s * s);
    (0..k)
        .map(|kk| {
            (0..=max_degree)
                .map(|kappa| {
                    if kk == 0 {
                        2.0 * c2 * s2 * (1.0 - c2.powi(kappa as i32))
                    } else if kappa < kk {
                        0.0
                    } else {
                        // (c²)^{κ+1−k} keeps ϑ = π/2 finite
                        s2.powi(1 + kk as i32)
                            * binomial_f64(kappa, kk)
                            * c2.powi((kappa + 1 - kk) as i32)
                    }
                })
                .collect()
        })
        .collect()
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Unnormalised Fourier weights `p_k = m · V_k`, `k < K`.
pub fn fourier_components(graph: &Graph, theta: f64, k: usize) -> Result<Vec<f64>, AnalyticError> {
    require_plain(graph)?;
    let hist = degree_histogram(graph);
    let max_degree = hist.counts.len().saturating_sub(1);
    Ok(feature_basis_vectors(theta, max_degree, k)
        .into_iter()
        .map(|v| v.iter().zip(&hist.counts).map(|(a, &m)| a * m as f64).sum())
        .collect())
}

/// Normalised Fourier feature distribution over bins `0..K`; a vanishing
/// signal maps to the point mass at `k = 0`.
pub fn fourier_features(
    graph: &Graph,
    config: &RamseyConfig,
) -> Result<ProbabilityDistribution, AnalyticError> {
    let k = config.components_for(graph);
    config.validate(k)?;
    let p = fourier_components(graph, config.theta, k)?;
    if p.iter().sum::<f64>() < DEGENERATE_TOL {
        return Ok(ProbabilityDistribution::point_mass(0));
    }
    Ok(ProbabilityDistribution::from_dense(p)?)
}

/// The closed-form trace sampled on the config's grid.
pub fn sampled_trace(graph: &Graph, config: &RamseyConfig) -> Result<Vec<f64>, AnalyticError> {
    config
        .time_grid()
        .into_iter()
        .map(|t| occupation_trace(graph, config.theta, t))
        .collect()
}

/// Fourier features from a trapezoid DFT of the sampled trace instead of the
/// basis vectors.
pub fn fourier_features_dft(
    graph: &Graph,
    config: &RamseyConfig,
) -> Result<ProbabilityDistribution, AnalyticError> {
    let k = config.components_for(graph);
    config.validate(k)?;
    Ok(fourier_distribution(&sampled_trace(graph, config)?, k)?)
}

/// Trace for graphs with node fields `h_i` and edge weights `J_ij`:
/// `2s²c² Σ_i Re[1 − e^{i h_i t} Π_{j∈N(i)} (c² + s² e^{i J_ij t})]`.
pub fn occupation_trace_generic(graph: &Graph, theta: f64, t: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let (c2, s2) = (c * c, s * s);
    let adj = graph.adjacency();
    let sum: f64 = adj
        .iter()
        .enumerate()
        .map(|(i, nbrs)| {
            let prod = nbrs.iter().fold(
                Complex64::from_polar(1.0, graph.field(i) * t),
                |acc, &(_, e)| acc * (c2 + Complex64::from_polar(s2, graph.weight(e) * t)),
            );
            1.0 - prod.re
        })
        .sum();
    2.0 * c2 * s2 * sum
}

/// Time-averaged occupation of each site, `2c²s²(1 − c^{2κ_i})`.
pub fn steady_state_features(graph: &Graph, theta: f64) -> Result<Vec<f64>, AnalyticError> {
    require_plain(graph)?;
    let (s, c) = theta.sin_cos();
    let (c2, s2) = (c * c, s * s);
    Ok(graph
        .degrees()
        .into_iter()
        .map(|k| 2.0 * c2 * s2 * (1.0 - c2.powi(k as i32)))
        .collect())
}
