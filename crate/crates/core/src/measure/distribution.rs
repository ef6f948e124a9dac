use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MeasureError;

/// How observable values are mapped onto integer bin ids.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum BinningSpec {
    /// Bin id is the value rounded to the nearest integer.
    #[default]
    Integer,
    /// Bin id is `floor((value - origin) / width)`.
    FixedWidth { width: f64, origin: f64 },
}

impl BinningSpec {
    /// `FixedWidth` with 64 bins spanning `[min, max]` of `values`.
    pub fn spanning(values: &[f64]) -> Self {
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        if !lo.is_finite() || !hi.is_finite() || hi <= lo {
            return BinningSpec::FixedWidth {
                width: 1.0,
                origin: if lo.is_finite() { lo } else { 0.0 },
            };
        }
        BinningSpec::FixedWidth {
            width: (hi - lo) / 64.0,
            origin: lo,
        }
    }

    pub fn validate(&self) -> Result<(), MeasureError> {
        match *self {
            BinningSpec::Integer => Ok(()),
            BinningSpec::FixedWidth { width, origin } => {
                if width > 0.0 && width.is_finite() && origin.is_finite() {
                    Ok(())
                } else {
                    Err(MeasureError::InvalidBinning(format!(
                        "width {width} and origin {origin}"
                    )))
                }
            }
        }
    }

    pub fn bin_of(&self, value: f64) -> i64 {
        match *self {
            BinningSpec::Integer => value.round() as i64,
            BinningSpec::FixedWidth { width, origin } => {
                // values sitting on a bin edge up to rounding go to the upper bin
                ((value - origin) / width + 1e-9).floor() as i64
            }
        }
    }

    /// Representative value of bin `id`.
    pub fn center(&self, id: i64) -> f64 {
        match *self {
            BinningSpec::Integer => id as f64,
            BinningSpec::FixedWidth { width, origin } => origin + (id as f64 + 0.5) * width,
        }
    }
}

/// Normalised distribution over strictly increasing integer bin ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityDistribution {
    bins: Vec<i64>,
    probs: Vec<f64>,
}

impl ProbabilityDistribution {
    /// Validates the pair of vectors and renormalises to sum 1.
    pub fn new(bins: Vec<i64>, probs: Vec<f64>) -> Result<Self, MeasureError> {
        if bins.len() != probs.len() {
            return Err(MeasureError::InvalidDistribution(format!(
                "{} bins but {} probabilities",
                bins.len(),
                probs.len()
            )));
        }
        if bins.is_empty() {
            return Err(MeasureError::InvalidDistribution("no bins".into()));
        }
        if bins.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MeasureError::InvalidDistribution(
                "bin ids must be strictly increasing".into(),
            ));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(MeasureError::InvalidDistribution(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(MeasureError::InvalidDistribution("total weight is zero".into()));
        }
        let probs = probs.into_iter().map(|p| p / total).collect();
        Ok(Self { bins, probs })
    }

    /// Normalises a bin → weight map.
    pub fn from_weights(weights: BTreeMap<i64, f64>) -> Result<Self, MeasureError> {
        let (bins, probs) = weights.into_iter().unzip();
        Self::new(bins, probs)
    }

    /// Dense distribution over bins `0..probs.len()`.
    pub fn from_dense(probs: Vec<f64>) -> Result<Self, MeasureError> {
        Self::new((0..probs.len() as i64).collect(), probs)
    }

    pub fn point_mass(bin: i64) -> Self {
        Self {
            bins: vec![bin],
            probs: vec![1.0],
        }
    }

    pub fn bins(&self) -> &[i64] {
        &self.bins
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Probability of `bin` (0 outside the support).
    pub fn get(&self, bin: i64) -> f64 {
        self.bins
            .binary_search(&bin)
            .map_or(0.0, |k| self.probs[k])
    }

    /// Both distributions on the union of their bins, zero-filled.
    pub fn align(&self, other: &Self) -> (Vec<i64>, Vec<f64>, Vec<f64>) {
        let mut bins = Vec::with_capacity(self.len() + other.len());
        let mut p = Vec::with_capacity(bins.capacity());
        let mut q = Vec::with_capacity(bins.capacity());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < other.len() {
            let a = self.bins.get(i).copied().unwrap_or(i64::MAX);
            let b = other.bins.get(j).copied().unwrap_or(i64::MAX);
            if a == b {
                bins.push(a);
                p.push(self.probs[i]);
                q.push(other.probs[j]);
                i += 1;
                j += 1;
            } else if a < b {
                bins.push(a);
                p.push(self.probs[i]);
                q.push(0.0);
                i += 1;
            } else {
                bins.push(b);
                p.push(0.0);
                q.push(other.probs[j]);
                j += 1;
            }
        }
        (bins, p, q)
    }

    /// Total-variation distance `½ Σ |p − q|`.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let (_, p, q) = self.align(other);
        0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// `Σ center(bin) · p`.
    pub fn mean(&self, binning: &BinningSpec) -> f64 {
        self.bins
            .iter()
            .zip(&self.probs)
            .map(|(b, p)| binning.center(*b) * p)
            .sum()
    }
}
