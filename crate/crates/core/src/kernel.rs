//! Jensen-Shannon kernels between outcome distributions.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::ProbabilityDistribution;
use crate::parallel::*;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("kernel matrices have shapes {0} and {1}")]
    ShapeMismatch(usize, usize),
    #[error("{0} weights for {1} kernels")]
    WeightCount(usize, usize),
    #[error("weight {0} is negative")]
    NegativeWeight(f64),
    #[error("mu must be non-negative, got {0}")]
    InvalidMu(f64),
    #[error("empty input")]
    Empty,
    #[error("reference kernel entry ({0}, {1}) is zero")]
    ZeroReference(usize, usize),
    #[error("matrix is not square: {0} values for {1} ids")]
    NotSquare(usize, usize),
}

/// `−Σ p ln p` in nats.
pub fn shannon_entropy(p: &ProbabilityDistribution) -> f64 {
    entropy(p.probs())
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>()
}

/// `H((P+P′)/2) − (H(P)+H(P′))/2` on the union of supports.
///
/// Evaluated as the mean of the two KL divergences to the midpoint, which has
/// no cancellation for nearly equal inputs, and clamped to `[0, ln 2]`.
pub fn js_divergence(p: &ProbabilityDistribution, q: &ProbabilityDistribution) -> f64 {
    let (_, a, b) = p.align(q);
    let term = |x: f64, m: f64| if x > 0.0 { x * (2.0 * x / m).ln() } else { 0.0 };
    let mut acc = 0.0;
    for (&x, &y) in a.iter().zip(&b) {
        let m = x + y;
        // one addition per bin keeps JS(P, P′) bitwise equal to JS(P′, P)
        acc += term(x, m) + term(y, m);
    }
    (0.5 * acc).clamp(0.0, std::f64::consts::LN_2)
}

/// `exp(−μ JS(P, P′))`.
pub fn qe_kernel(p: &ProbabilityDistribution, q: &ProbabilityDistribution, mu: f64) -> f64 {
    (-mu * js_divergence(p, q)).exp()
}

/// Symmetric kernel matrix with row and column ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    ids: Vec<usize>,
    values: Vec<f64>,
}

impl KernelMatrix {
    /// Row-major `values` of size `ids.len()²`.
    pub fn new(ids: Vec<usize>, values: Vec<f64>) -> Result<Self, KernelError> {
        if values.len() != ids.len() * ids.len() {
            return Err(KernelError::NotSquare(values.len(), ids.len()));
        }
        Ok(Self { ids, values })
    }

    /// Fills `f(i, j)` for `i ≤ j` in parallel and mirrors the rest.
    pub fn from_fn<F>(ids: Vec<usize>, f: F) -> Self
    where
        F: Fn(usize, usize) -> f64 + Sync + Send,
    {
        let n = ids.len();
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (i..n).map(|j| f(i, j)).collect())
            .collect();
        let mut values = vec![0.0; n * n];
        for (i, row) in upper.into_iter().enumerate() {
            for (off, v) in row.into_iter().enumerate() {
                let j = i + off;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Self { ids, values }
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Sub-matrix on the given row/column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            let row = self.row(r);
            out.extend(cols.iter().map(|&c| row[c]));
        }
        out
    }

    /// Principal sub-matrix as a new kernel matrix.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        Self {
            ids: idx.iter().map(|&i| self.ids[i]).collect(),
            values: self.select(idx, idx),
        }
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the (symmetrised) matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.len();
        if n == 0 {
            return 0.0;
        }
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)));
        SymmetricEigen::new(m).eigenvalues.min()
    }

    /// CSV with graph ids as row and column headers.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for id in &self.ids {
            let _ = write!(out, ",{id}");
        }
        out.push('\n');
        for (i, id) in self.ids.iter().enumerate() {
            let _ = write!(out, "{id}");
            for v in self.row(i) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Pairwise QE kernel over `dists`; ids default to positions.
pub fn kernel_matrix(
    dists: &[ProbabilityDistribution],
    mu: f64,
) -> Result<KernelMatrix, KernelError> {
    kernel_matrix_with_ids(dists, (0..dists.len()).collect(), mu)
}

pub fn kernel_matrix_with_ids(
    dists: &[ProbabilityDistribution],
    ids: Vec<usize>,
    mu: f64,
) -> Result<KernelMatrix, KernelError> {
    if dists.is_empty() {
        return Err(KernelError::Empty);
    }
    if ids.len() != dists.len() {
        return Err(KernelError::ShapeMismatch(ids.len(), dists.len()));
    }
    if !(mu >= 0.0) {
        return Err(KernelError::InvalidMu(mu));
    }
    let k = KernelMatrix::from_fn(ids, |i, j| {
        if i == j {
            1.0
        } else {
            qe_kernel(&dists[i], &dists[j], mu)
        }
    });
    if log::log_enabled!(log::Level::Debug) && k.len() <= 2000 {
        log::debug!("QE Gram matrix of size {}: min eigenvalue {:.3e}", k.len(), k.min_eigenvalue());
    }
    Ok(k)
}

/// `δK_ij = |1 − K_noisy(i,j) / K_clean(i,j)|`, row-major.
pub fn relative_kernel_deviation(
    noisy: &KernelMatrix,
    clean: &KernelMatrix,
) -> Result<Vec<f64>, KernelError> {
    if noisy.len() != clean.len() {
        return Err(KernelError::ShapeMismatch(noisy.len(), clean.len()));
    }
    let n = clean.len();
    noisy
        .values()
        .iter()
        .zip(clean.values())
        .enumerate()
        .map(|(k, (a, b))| {
            if *b == 0.0 {
                Err(KernelError::ZeroReference(k / n, k % n))
            } else {
                Ok((1.0 - a / b).abs())
            }
        })
        .collect()
}

/// `Σ_i p_i K_i`.
pub fn combine_kernels(kernels: &[KernelMatrix], weights: &[f64]) -> Result<KernelMatrix, KernelError> {
    let first = kernels.first().ok_or(KernelError::Empty)?;
    if weights.len() != kernels.len() {
        return Err(KernelError::WeightCount(weights.len(), kernels.len()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
        return Err(KernelError::NegativeWeight(*w));
    }
    if let Some(k) = kernels.iter().find(|k| k.len() != first.len()) {
        return Err(KernelError::ShapeMismatch(first.len(), k.len()));
    }
    let mut values = vec![0.0; first.values.len()];
    for (k, &w) in kernels.iter().zip(weights) {
        values.iter_mut().zip(&k.values).for_each(|(v, x)| *v += w * x);
    }
    Ok(KernelMatrix {
        ids: first.ids.clone(),
        values,
    })
}

/// Empirical quantile with linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}
