use std::fmt::Display;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::covariance::CovarianceKind;
use super::gp::{gp_fit_ml, lcb};
use super::BayesError;
use crate::parallel::*;

/// Candidate pool size for joint posterior draws in batch mode.
const THOMPSON_POOL: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoConfig {
    pub bounds: Vec<(f64, f64)>,
    pub n_init: usize,
    pub budget: usize,
    pub kappa: f64,
    pub candidate_samples: usize,
    /// Points evaluated per batch; above 1 each point minimises its own
    /// posterior draw.
    pub workers: usize,
    pub seed: u64,
    pub covariance: CovarianceKind,
    pub restarts: usize,
    /// Evaluated first, as part of the initial design.
    pub initial_points: Vec<Vec<f64>>,
    /// JSON-lines log; existing entries are replayed instead of re-evaluated.
    pub history_path: Option<PathBuf>,
}

impl Default for BoConfig {
    fn default() -> Self {
        Self {
            bounds: vec![(0.0, 1.0)],
            n_init: 10,
            budget: 30,
            kappa: 2.0,
            candidate_samples: 5000,
            workers: 1,
            seed: 0,
            covariance: CovarianceKind::default(),
            restarts: 3,
            initial_points: Vec::new(),
            history_path: None,
        }
    }
}

impl BoConfig {
    pub fn validate(&self) -> Result<(), BayesError> {
        let bad = |m: String| Err(BayesError::InvalidConfig(m));
        if self.bounds.is_empty() {
            return bad("no dimensions".into());
        }
        if let Some((lo, hi)) = self.bounds.iter().find(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return bad(format!("invalid bound [{lo}, {hi}]"));
        }
        let n_init = self.n_init.max(self.initial_points.len());
        if n_init == 0 || self.budget < n_init {
            return bad(format!("budget {} must be at least the initial design {}", self.budget, n_init));
        }
        if self.candidate_samples == 0 || self.workers == 0 {
            return bad("candidate_samples and workers must be positive".into());
        }
        if !(self.kappa >= 0.0) {
            return bad(format!("kappa must be non-negative, got {}", self.kappa));
        }
        for p in &self.initial_points {
            if p.len() != self.bounds.len() || p.iter().zip(&self.bounds).any(|(v, (lo, hi))| v < lo || v > hi) {
                return bad(format!("initial point {p:?} outside the box"));
            }
        }
        Ok(())
    }

    fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.bounds).map(|(v, (lo, hi))| (v - lo) / (hi - lo)).collect()
    }

    fn scale_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.bounds).map(|(v, (lo, hi))| lo + v * (hi - lo)).collect()
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(stream);
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub iteration: usize,
    pub x: Vec<f64>,
    pub value: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoResult {
    pub best_x: Vec<f64>,
    pub best_value: f64,
    pub history: Vec<Evaluation>,
}

pub fn read_history(path: &Path) -> Result<Vec<Evaluation>, BayesError> {
    let file = File::open(path).map_err(|e| BayesError::History(e.to_string()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| BayesError::History(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let e: Evaluation = serde_json::from_str(&line)
            .map_err(|e| BayesError::History(format!("line {}: {e}", i + 1)))?;
        if e.iteration != out.len() {
            return Err(BayesError::History(format!(
                "line {}: iteration {} out of order",
                i + 1,
                e.iteration
            )));
        }
        out.push(e);
    }
    Ok(out)
}

struct Log(Option<File>);

impl Log {
    fn record(&mut self, e: &Evaluation) -> Result<(), BayesError> {
        if let Some(f) = &mut self.0 {
            let line = serde_json::to_string(e).map_err(|e| BayesError::History(e.to_string()))?;
            writeln!(f, "{line}").and_then(|_| f.flush()).map_err(|e| BayesError::History(e.to_string()))?;
        }
        Ok(())
    }
}

/// Minimises `objective` over the box in `cfg.bounds` with a GP surrogate.
pub fn bayes_optimize<F, E>(objective: F, cfg: &BoConfig) -> Result<BoResult, BayesError>
where
    F: Fn(&[f64]) -> Result<f64, E> + Sync,
    E: Display,
{
    cfg.validate()?;
    let dim = cfg.bounds.len();
    let n_init = cfg.n_init.max(cfg.initial_points.len());

    let mut design = cfg.initial_points.clone();
    let mut rng = cfg.rng(0);
    while design.len() < n_init {
        let u: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        design.push(cfg.scale_unit(&u));
    }

    let mut history = match &cfg.history_path {
        Some(p) if p.exists() => read_history(p)?,
        _ => Vec::new(),
    };
    history.truncate(cfg.budget);
    if let Some(e) = history.iter().find(|e| e.x.len() != dim) {
        return Err(BayesError::History(format!("entry {} has the wrong dimension", e.iteration)));
    }
    if !history.is_empty() {
        log::info!("resuming from {} logged evaluations", history.len());
    }
    let mut log = Log(match &cfg.history_path {
        Some(p) => Some(
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .map_err(|e| BayesError::History(e.to_string()))?,
        ),
        None => None,
    });

    let start = Instant::now();
    let evaluate = |batch: Vec<Vec<f64>>, first: usize| -> Result<Vec<Evaluation>, BayesError> {
        let values: Vec<Result<f64, BayesError>> = batch
            .par_iter()
            .map(|x| match objective(x) {
                Ok(v) if v.is_finite() => Ok(v),
                Ok(v) => Err(BayesError::Objective {
                    x: x.clone(),
                    message: format!("non-finite value {v}"),
                }),
                Err(e) => Err(BayesError::Objective {
                    x: x.clone(),
                    message: e.to_string(),
                }),
            })
            .collect();
        let wall = start.elapsed().as_secs_f64();
        batch
            .into_iter()
            .zip(values)
            .enumerate()
            .map(|(k, (x, v))| {
                Ok(Evaluation {
                    iteration: first + k,
                    x,
                    value: v?,
                    wall_time_s: wall,
                })
            })
            .collect()
    };

    while history.len() < n_init {
        let end = (history.len() + cfg.workers).min(n_init);
        let batch = design[history.len()..end].to_vec();
        for e in evaluate(batch, history.len())? {
            log.record(&e)?;
            history.push(e);
        }
    }

    while history.len() < cfg.budget {
        let it = history.len();
        let xs: Vec<Vec<f64>> = history.iter().map(|e| cfg.to_unit(&e.x)).collect();
        let ys: Vec<f64> = history.iter().map(|e| e.value).collect();
        let gp = gp_fit_ml(&xs, &ys, cfg.covariance, cfg.restarts, cfg.seed ^ it as u64)?;
        let batch_len = cfg.workers.min(cfg.budget - it);
        let draw_unit = |rng: &mut ChaCha8Rng, count: usize| -> Vec<Vec<f64>> {
            (0..count)
                .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
                .collect()
        };
        let batch: Vec<Vec<f64>> = if cfg.workers == 1 {
            let cands = draw_unit(&mut cfg.rng(1 + it as u64 * 1024), cfg.candidate_samples);
            let scores: Vec<f64> = cands
                .par_iter()
                .map(|u| lcb(&gp, u, cfg.kappa).expect("kappa validated"))
                .collect();
            vec![cfg.scale_unit(&cands[argmin(&scores)])]
        } else {
            (0..batch_len)
                .map(|w| {
                    let mut rng = cfg.rng(1 + it as u64 * 1024 + w as u64);
                    let pool = draw_unit(&mut rng, cfg.candidate_samples.min(THOMPSON_POOL));
                    let draw = gp.sample_joint(&pool, &mut rng)?;
                    Ok(cfg.scale_unit(&pool[argmin(&draw)]))
                })
                .collect::<Result<_, BayesError>>()?
        };
        for e in evaluate(batch, it)? {
            log.record(&e)?;
            history.push(e);
        }
    }

    let best = argmin(&history.iter().map(|e| e.value).collect::<Vec<_>>());
    Ok(BoResult {
        best_x: history[best].x.clone(),
        best_value: history[best].value,
        history,
    })
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn quadratic(x: &[f64]) -> Result<f64, Infallible> {
        Ok((x[0] - 0.3).powi(2))
    }

    #[test]
    fn quadratic_minimum() {
        let cfg = BoConfig {
            n_init: 5,
            budget: 30,
            seed: 7,
            ..Default::default()
        };
        let r = bayes_optimize(quadratic, &cfg).unwrap();
        assert_eq!(r.history.len(), 30);
        assert!((r.best_x[0] - 0.3).abs() < 0.02, "best {:?}", r.best_x);
        let min = r.history.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_value, min);
    }

    #[test]
    fn budget_equal_to_initial_design() {
        let cfg = BoConfig {
            n_init: 6,
            budget: 6,
            ..Default::default()
        };
        let r = bayes_optimize(quadratic, &cfg).unwrap();
        assert_eq!(r.history.len(), 6);
        let min = r.history.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_value, min);
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = BoConfig {
            bounds: vec![(-1.0, 1.0), (0.0, 2.0)],
            n_init: 4,
            budget: 9,
            workers: 3,
            seed: 11,
            ..Default::default()
        };
        let f = |x: &[f64]| -> Result<f64, Infallible> { Ok(x[0] * x[0] + (x[1] - 1.0).powi(2)) };
        let a = bayes_optimize(f, &cfg).unwrap();
        let b = bayes_optimize(f, &cfg).unwrap();
        assert_eq!(a.history.len(), 9);
        for (p, q) in a.history.iter().zip(&b.history) {
            assert_eq!((p.iteration, &p.x, p.value), (q.iteration, &q.x, q.value));
        }
    }

    #[test]
    fn objective_failure_carries_point() {
        let cfg = BoConfig {
            n_init: 2,
            budget: 3,
            initial_points: vec![vec![0.9]],
            ..Default::default()
        };
        let f = |x: &[f64]| if x[0] > 0.5 { Err("boom") } else { Ok(0.0) };
        match bayes_optimize(f, &cfg) {
            Err(BayesError::Objective { x, message }) => {
                assert_eq!(x, vec![0.9]);
                assert_eq!(message, "boom");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn resume_replays_log() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("hist.jsonl");
        let base = BoConfig {
            n_init: 4,
            budget: 8,
            seed: 5,
            history_path: Some(path.clone()),
            ..Default::default()
        };
        let partial = BoConfig { budget: 6, ..base.clone() };
        bayes_optimize(quadratic, &partial).unwrap();
        assert_eq!(read_history(&path).unwrap().len(), 6);

        let calls = std::sync::atomic::AtomicUsize::new(0);
        let counting = |x: &[f64]| {
            calls.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            quadratic(x)
        };
        let resumed = bayes_optimize(counting, &base).unwrap();
        assert_eq!(calls.into_inner(), 2);
        let fresh = bayes_optimize(quadratic, &BoConfig { history_path: None, ..base }).unwrap();
        for (p, q) in resumed.history.iter().zip(&fresh.history) {
            assert_eq!((&p.x, p.value), (&q.x, q.value));
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            BoConfig { budget: 3, n_init: 5, ..Default::default() },
            BoConfig { bounds: vec![(1.0, 0.0)], ..Default::default() },
            BoConfig { kappa: -1.0, ..Default::default() },
            BoConfig { initial_points: vec![vec![2.0]], ..Default::default() },
        ];
        for cfg in bad {
            assert!(bayes_optimize(quadratic, &cfg).is_err());
        }
    }
}
