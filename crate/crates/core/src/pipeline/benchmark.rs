use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::features::{compute_features, feature_kernel, EvolutionSpec, FeatureConfig};
use crate::bayes::{bayes_optimize, BoConfig, Evaluation};
use crate::classical::{graphlet_kernel_matrix, random_walk_kernel_matrix, ClassicalError};
use crate::graph::Dataset;
use crate::ml::{cross_validate, CvConfig, CvReport};
use crate::sim::EvolutionKind;
use crate::{Error, Result};

/// Top-level keys every benchmark report carries.
pub const REPORT_FIELDS: [&str; 9] = [
    "dataset",
    "samples",
    "class_counts",
    "majority_fraction",
    "config",
    "qe",
    "baselines",
    "timing_s",
    "complete",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    pub enabled: bool,
    pub c_grid: Vec<f64>,
    pub rw_lambdas: Vec<f64>,
    pub graphlet_sizes: Vec<usize>,
    pub graphlet_samples: usize,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            c_grid: vec![1e-3, 1e-2, 1e-1],
            rw_lambdas: vec![1e-3, 3e-3, 1e-2],
            graphlet_sizes: vec![3, 4, 5, 6],
            graphlet_samples: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkConfig {
    pub kind: EvolutionKind,
    /// Number of layers `p`.
    pub depth: usize,
    /// First pulse angle, held fixed.
    pub theta0: f64,
    pub time_bounds: (f64, f64),
    pub theta_bounds: (f64, f64),
    /// Interleaved sequence to use instead of training one.
    pub sequence: Option<Vec<f64>>,
    /// Observable, binning, shots and noise; the evolution is replaced.
    pub features: FeatureConfig,
    pub mu: f64,
    pub cv: CvConfig,
    /// Cross-validation inside the optimisation loop; `cv` when absent.
    pub search_cv: Option<CvConfig>,
    /// Search settings; the bounds are derived from depth and the ranges above.
    pub bo: BoConfig,
    pub baselines: BaselineConfig,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            kind: EvolutionKind::Ising,
            depth: 1,
            theta0: std::f64::consts::FRAC_PI_4,
            time_bounds: (0.0, 2.0 * std::f64::consts::PI),
            theta_bounds: (0.0, std::f64::consts::PI),
            sequence: None,
            features: FeatureConfig::default(),
            mu: 1.0,
            cv: CvConfig::default(),
            search_cv: None,
            bo: BoConfig::default(),
            baselines: BaselineConfig::default(),
        }
    }
}

impl BenchmarkConfig {
    fn sequence_for(&self, x: &[f64]) -> Vec<f64> {
        std::iter::once(self.theta0).chain(x.iter().copied()).collect()
    }

    fn features_for(&self, sequence: Vec<f64>) -> FeatureConfig {
        FeatureConfig {
            evolution: EvolutionSpec::Layered {
                kind: self.kind,
                sequence,
            },
            ..self.features.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QeResult {
    /// Interleaved `[θ_0, t_1, θ_1, …]` used for the final kernel.
    pub sequence: Vec<f64>,
    /// Dataset positions dropped for exceeding the qubit budget.
    pub skipped: Vec<usize>,
    pub bo_history: Vec<Evaluation>,
    pub cv: CvReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub kernel: String,
    /// Graphlet size or walk weight of the best grid point.
    pub parameter: f64,
    /// Mean accuracy at each grid point that could be evaluated.
    pub grid: Vec<(f64, f64)>,
    pub cv: CvReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub dataset: String,
    pub samples: usize,
    pub class_counts: BTreeMap<usize, usize>,
    pub majority_fraction: f64,
    pub config: BenchmarkConfig,
    pub qe: Option<QeResult>,
    pub baselines: Vec<BaselineResult>,
    pub timing_s: BTreeMap<String, f64>,
    pub complete: bool,
}

fn qe_accuracy(dataset: &Dataset, labels: &[usize], cfg: &BenchmarkConfig, seq: Vec<f64>, cv: &CvConfig) -> Result<(CvReport, Vec<usize>)> {
    let feats = compute_features(&dataset.graphs, &cfg.features_for(seq))?;
    let k = feature_kernel(&feats, cfg.mu)?;
    let y: Vec<usize> = feats.indices.iter().map(|&i| labels[i]).collect();
    Ok((cross_validate(&k, &y, cv)?, feats.skipped))
}

fn best_baseline<F>(name: &str, grid: &[f64], labels: &[usize], cv: &CvConfig, build: F) -> Result<Option<BaselineResult>>
where
    F: Fn(f64) -> std::result::Result<crate::kernel::KernelMatrix, ClassicalError>,
{
    let mut scores = Vec::new();
    let mut best: Option<(f64, CvReport)> = None;
    for &p in grid {
        let k = match build(p) {
            Ok(k) => k,
            Err(e @ ClassicalError::InvalidLambda { .. }) => {
                log::warn!("{name} at {p} skipped: {e}");
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let r = cross_validate(&k, labels, cv)?;
        scores.push((p, r.mean_accuracy));
        if best.as_ref().is_none_or(|b| r.mean_accuracy > b.1.mean_accuracy) {
            best = Some((p, r));
        }
    }
    Ok(best.map(|(parameter, cv)| BaselineResult {
        kernel: name.into(),
        parameter,
        grid: scores,
        cv,
    }))
}

/// Trains the pulse sequence by Bayesian optimisation of CV accuracy (unless
/// one is given), scores the QE kernel, then the classical baselines.
/// `checkpoint` sees the report after every stage, so partial results
/// survive a failure in a later stage.
pub fn run_benchmark<C>(dataset: &Dataset, cfg: &BenchmarkConfig, mut checkpoint: C) -> Result<BenchmarkReport>
where
    C: FnMut(&BenchmarkReport),
{
    if cfg.depth == 0 {
        return Err(Error::Config("depth must be at least 1".into()));
    }
    let labels = dataset.labels();
    let mut report = BenchmarkReport {
        dataset: dataset.name.clone(),
        samples: dataset.len(),
        class_counts: dataset.class_counts.clone(),
        majority_fraction: dataset.majority_fraction(),
        config: cfg.clone(),
        qe: None,
        baselines: Vec::new(),
        timing_s: BTreeMap::new(),
        complete: false,
    };

    let start = Instant::now();
    let (sequence, history) = match &cfg.sequence {
        Some(s) => (s.clone(), Vec::new()),
        None => {
            let bounds: Vec<(f64, f64)> = (0..cfg.depth)
                .flat_map(|_| [cfg.time_bounds, cfg.theta_bounds])
                .collect();
            let bo = BoConfig {
                bounds,
                ..cfg.bo.clone()
            };
            let search_cv = cfg.search_cv.as_ref().unwrap_or(&cfg.cv);
            let objective = |x: &[f64]| -> Result<f64> {
                let (r, _) = qe_accuracy(dataset, &labels, cfg, cfg.sequence_for(x), search_cv)?;
                Ok(-r.mean_accuracy)
            };
            let res = bayes_optimize(objective, &bo)?;
            (cfg.sequence_for(&res.best_x), res.history)
        }
    };
    let (cv, skipped) = qe_accuracy(dataset, &labels, cfg, sequence.clone(), &cfg.cv)?;
    log::info!("QE accuracy {:.4} ± {:.4}", cv.mean_accuracy, cv.std_accuracy);
    report.qe = Some(QeResult {
        sequence,
        skipped,
        bo_history: history,
        cv,
    });
    report.timing_s.insert("qe".into(), start.elapsed().as_secs_f64());
    checkpoint(&report);

    if cfg.baselines.enabled {
        let b = &cfg.baselines;
        let cv = CvConfig {
            c_grid: b.c_grid.clone(),
            ..cfg.cv.clone()
        };
        let start = Instant::now();
        let sizes: Vec<f64> = b.graphlet_sizes.iter().map(|&k| k as f64).collect();
        if let Some(r) = best_baseline("GS", &sizes, &labels, &cv, |k| {
            graphlet_kernel_matrix(&dataset.graphs, k as usize, b.graphlet_samples, b.seed)
        })? {
            report.baselines.push(r);
        }
        report.timing_s.insert("gs".into(), start.elapsed().as_secs_f64());
        checkpoint(&report);

        let start = Instant::now();
        if let Some(r) = best_baseline("RW", &b.rw_lambdas, &labels, &cv, |l| {
            random_walk_kernel_matrix(&dataset.graphs, l)
        })? {
            report.baselines.push(r);
        }
        report.timing_s.insert("rw".into(), start.elapsed().as_secs_f64());
    }
    report.complete = true;
    checkpoint(&report);
    Ok(report)
}
