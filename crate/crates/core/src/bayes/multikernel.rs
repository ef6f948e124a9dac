use serde::{Deserialize, Serialize};

use super::optimize::{bayes_optimize, BoConfig, Evaluation};
use super::BayesError;
use crate::kernel::{combine_kernels, KernelMatrix};
use crate::ml::{cross_validate, CvConfig};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MultikernelConfig {
    pub cv: CvConfig,
    /// Objective calls; defaults to `50 R`.
    pub budget: Option<usize>,
    /// Initial design size including the one-hot vectors; defaults to `20 R`.
    pub n_init: Option<usize>,
    /// Bounds, budget and initial design are overwritten.
    pub bo: BoConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultikernelResult {
    pub weights: Vec<f64>,
    /// Mean CV accuracy of the combined kernel.
    pub score: f64,
    pub history: Vec<Evaluation>,
}

/// Optimises the weights of `Σ p_i K_i` with `p ∈ [0, 1]^R` for CV accuracy.
/// A single kernel is scored directly with weight 1.
pub fn optimize_multikernel(
    kernels: &[KernelMatrix],
    y: &[usize],
    cfg: &MultikernelConfig,
) -> Result<MultikernelResult, BayesError> {
    let r = kernels.len();
    if r == 0 {
        return Err(BayesError::InvalidConfig("no kernels to combine".into()));
    }
    if r == 1 {
        let score = cross_validate(&kernels[0], y, &cfg.cv)?.mean_accuracy;
        return Ok(MultikernelResult {
            weights: vec![1.0],
            score,
            history: vec![Evaluation {
                iteration: 0,
                x: vec![1.0],
                value: -score,
                wall_time_s: 0.0,
            }],
        });
    }
    let one_hots: Vec<Vec<f64>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let budget = cfg.budget.unwrap_or(50 * r);
    let bo = BoConfig {
        bounds: vec![(0.0, 1.0); r],
        budget,
        n_init: cfg.n_init.unwrap_or(20 * r).min(budget).max(r),
        initial_points: one_hots,
        ..cfg.bo.clone()
    };
    let objective = |p: &[f64]| -> Result<f64, BayesError> {
        if p.iter().all(|&w| w == 0.0) {
            // the zero kernel carries no information; score it as chance
            return Ok(0.0);
        }
        let k = combine_kernels(kernels, p)?;
        Ok(-cross_validate(&k, y, &cfg.cv)?.mean_accuracy)
    };
    let res = bayes_optimize(objective, &bo)?;
    Ok(MultikernelResult {
        weights: res.best_x,
        score: -res.best_value,
        history: res.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(y: &[usize], same: impl Fn(usize, usize) -> bool) -> KernelMatrix {
        let n = y.len();
        let values = (0..n * n)
            .map(|e| if same(y[e / n], y[e % n]) { 1.0 } else { 0.0 })
            .collect();
        KernelMatrix::new((0..n).collect(), values).unwrap()
    }

    fn cv() -> CvConfig {
        CvConfig {
            folds: 3,
            repeats: 2,
            ..Default::default()
        }
    }

    #[test]
    fn single_kernel_is_scored_directly() {
        let y: Vec<usize> = (0..12).map(|i| i % 2).collect();
        let k = block(&y, |a, b| a == b);
        let cfg = MultikernelConfig {
            cv: cv(),
            ..Default::default()
        };
        let r = optimize_multikernel(std::slice::from_ref(&k), &y, &cfg).unwrap();
        assert_eq!(r.score, cross_validate(&k, &y, &cfg.cv).unwrap().mean_accuracy);
        assert_eq!(r.weights, vec![1.0]);
    }

    #[test]
    fn never_below_best_single_kernel() {
        let y: Vec<usize> = (0..18).map(|i| i % 3).collect();
        // each kernel only tells one class apart from the rest
        let k0 = block(&y, |a, b| (a == 0) == (b == 0));
        let k1 = block(&y, |a, b| (a == 1) == (b == 1));
        let cfg = MultikernelConfig {
            cv: cv(),
            budget: Some(8),
            n_init: Some(4),
            bo: BoConfig {
                candidate_samples: 200,
                ..Default::default()
            },
        };
        let singles: Vec<f64> = [&k0, &k1]
            .iter()
            .map(|k| cross_validate(k, &y, &cfg.cv).unwrap().mean_accuracy)
            .collect();
        let r = optimize_multikernel(&[k0, k1], &y, &cfg).unwrap();
        assert_eq!(r.history.len(), 8);
        let best_single = singles.iter().copied().fold(0.0, f64::max);
        assert!(r.score >= best_single - 1e-12);
        assert!(r.score > best_single, "combined {} vs singles {singles:?}", r.score);
    }
}
