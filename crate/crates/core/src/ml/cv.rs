use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::svm::{one_vs_one, SvmConfig};
use super::MlError;
use crate::kernel::KernelMatrix;
use crate::parallel::*;

/// Seven log-spaced points from `1e-3` to `1e3`.
pub fn default_c_grid() -> Vec<f64> {
    (-3..=3).map(|e| 10f64.powi(e)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub c_grid: Vec<f64>,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CvConfig {
    fn default() -> Self {
        let svm = SvmConfig::default();
        Self {
            folds: 10,
            repeats: 10,
            c_grid: default_c_grid(),
            seed: 0,
            tol: svm.tol,
            max_iter: svm.max_iter,
        }
    }
}

/// Score of one held-out fold under the C chosen for its repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldScore {
    pub repetition: usize,
    pub fold: usize,
    pub c: f64,
    pub accuracy: f64,
    /// Test or training part lacks a second class.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    /// Mean over all folds of all repetitions, C chosen per repetition.
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub splits: Vec<FoldScore>,
    /// Shuffle seed of each repetition.
    pub seeds: Vec<u64>,
    pub chosen_c: Vec<f64>,
    pub c_grid: Vec<f64>,
    /// `accuracy[repetition][grid point][fold]`.
    pub grid_accuracy: Vec<Vec<Vec<f64>>>,
    /// Single C for the whole dataset, chosen on the pooled folds.
    pub dataset_best_c: f64,
    pub dataset_best_mean: f64,
    pub dataset_best_std: f64,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// First index of the maximum; ties go to the smaller C.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Repeated k-fold cross-validation of a one-vs-one SVM with a grid search
/// over C.
pub fn cross_validate(k: &KernelMatrix, y: &[usize], cfg: &CvConfig) -> Result<CvReport, MlError> {
    let n = k.len();
    if y.len() != n {
        return Err(MlError::SizeMismatch {
            what: "labels",
            expected: n,
            got: y.len(),
        });
    }
    if cfg.folds < 2 || cfg.folds > n {
        return Err(MlError::TooManyFolds {
            folds: cfg.folds,
            samples: n,
        });
    }
    if let Some(&c) = cfg.c_grid.iter().find(|c| !(**c > 0.0) || !c.is_finite()) {
        return Err(MlError::BadParameter { name: "C", value: c });
    }
    if cfg.c_grid.is_empty() || cfg.repeats == 0 {
        return Err(MlError::BadParameter {
            name: "grid size or repeats",
            value: 0.0,
        });
    }
    if k.values().iter().any(|v| !v.is_finite()) {
        return Err(MlError::NonFinite);
    }

    let seeds: Vec<u64> = (0..cfg.repeats as u64).map(|r| cfg.seed.wrapping_add(r)).collect();
    let splits: Vec<Vec<Vec<usize>>> = seeds
        .iter()
        .map(|&s| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
            (0..cfg.folds)
                .map(|f| order[f * n / cfg.folds..(f + 1) * n / cfg.folds].to_vec())
                .collect()
        })
        .collect();

    let n_c = cfg.c_grid.len();
    let jobs: Vec<(usize, usize, usize)> = (0..cfg.repeats)
        .flat_map(|r| (0..cfg.folds).flat_map(move |f| (0..n_c).map(move |c| (r, f, c))))
        .collect();
    let results: Vec<(f64, bool)> = jobs
        .par_iter()
        .map(|&(r, f, ci)| {
            let test = &splits[r][f];
            let mut train: Vec<usize> = splits[r]
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, part)| part.iter().copied())
                .collect();
            train.sort_unstable();
            let train_y: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            let svm = SvmConfig {
                c: cfg.c_grid[ci],
                tol: cfg.tol,
                max_iter: cfg.max_iter,
            };
            let mut flagged = {
                let first = y[test[0]];
                test.iter().all(|&i| y[i] == first)
            };
            let predict: Box<dyn Fn(usize) -> usize> = match one_vs_one(&k.restrict(&train), &train_y, &svm) {
                Ok(model) => Box::new(move |i| {
                    let row: Vec<f64> = train.iter().map(|&j| k.get(i, j)).collect();
                    model.predict(&row)
                }),
                Err(_) => {
                    flagged = true;
                    let only = train_y[0];
                    Box::new(move |_| only)
                }
            };
            let correct = test.iter().filter(|&&i| predict(i) == y[i]).count();
            (correct as f64 / test.len() as f64, flagged)
        })
        .collect();

    let at = |r: usize, f: usize, c: usize| results[(r * cfg.folds + f) * n_c + c];
    let grid_accuracy: Vec<Vec<Vec<f64>>> = (0..cfg.repeats)
        .map(|r| {
            (0..n_c)
                .map(|c| (0..cfg.folds).map(|f| at(r, f, c).0).collect())
                .collect()
        })
        .collect();

    let mut chosen_c = Vec::with_capacity(cfg.repeats);
    let mut scores = Vec::with_capacity(cfg.repeats * cfg.folds);
    for (r, per_c) in grid_accuracy.iter().enumerate() {
        let means: Vec<f64> = per_c.iter().map(|a| mean_std(a).0).collect();
        let ci = argmax(&means);
        chosen_c.push(cfg.c_grid[ci]);
        for f in 0..cfg.folds {
            let (accuracy, flagged) = at(r, f, ci);
            scores.push(FoldScore {
                repetition: r,
                fold: f,
                c: cfg.c_grid[ci],
                accuracy,
                flagged,
            });
        }
    }
    let accs: Vec<f64> = scores.iter().map(|s| s.accuracy).collect();
    let (mean_accuracy, std_accuracy) = mean_std(&accs);

    let pooled: Vec<Vec<f64>> = (0..n_c)
        .map(|c| grid_accuracy.iter().flat_map(|per_c| per_c[c].iter().copied()).collect())
        .collect();
    let pooled_means: Vec<f64> = pooled.iter().map(|a| mean_std(a).0).collect();
    let best = argmax(&pooled_means);
    let (dataset_best_mean, dataset_best_std) = mean_std(&pooled[best]);

    Ok(CvReport {
        mean_accuracy,
        std_accuracy,
        splits: scores,
        seeds,
        chosen_c,
        c_grid: cfg.c_grid.clone(),
        grid_accuracy,
        dataset_best_c: cfg.c_grid[best],
        dataset_best_mean,
        dataset_best_std,
    })
}
