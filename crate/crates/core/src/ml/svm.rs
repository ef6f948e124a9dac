use serde::{Deserialize, Serialize};

use super::MlError;
use crate::kernel::KernelMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub c: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            max_iter: 100_000,
        }
    }
}

/// Dual solution of a binary C-SVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub alphas: Vec<f64>,
    pub support: Vec<usize>,
    pub bias: f64,
    pub labels: Vec<i8>,
    pub c: f64,
    pub iterations: usize,
}

impl SvmModel {
    /// `Σ_{i∈SV} y_i α_i k_i + b`.
    pub fn decision(&self, k_row: &[f64]) -> f64 {
        self.support
            .iter()
            .map(|&i| f64::from(self.labels[i]) * self.alphas[i] * k_row[i])
            .sum::<f64>()
            + self.bias
    }

    /// `½ αᵀQα − Σα` for the Gram matrix the model was trained on.
    pub fn dual_objective(&self, k: &[f64]) -> f64 {
        dual_objective(k, &self.labels, &self.alphas)
    }
}

pub(crate) fn dual_objective(k: &[f64], y: &[i8], alpha: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alpha[i] * alpha[j] * f64::from(y[i] * y[j]) * k[i * n + j];
        }
    }
    0.5 * quad - alpha.iter().sum::<f64>()
}

/// Trains on a row-major `n × n` Gram matrix with labels `±1` using SMO with
/// maximal-violating-pair selection.
pub fn svm_train(k: &[f64], y: &[i8], cfg: &SvmConfig) -> Result<SvmModel, MlError> {
    let n = y.len();
    if k.len() != n * n {
        return Err(MlError::SizeMismatch {
            what: "Gram matrix entries",
            expected: n * n,
            got: k.len(),
        });
    }
    if let Some(&b) = y.iter().find(|&&v| v != 1 && v != -1) {
        return Err(MlError::BadLabel(b.into()));
    }
    if !(cfg.c > 0.0) || !cfg.c.is_finite() {
        return Err(MlError::BadParameter {
            name: "C",
            value: cfg.c,
        });
    }
    if k.iter().any(|v| !v.is_finite()) {
        return Err(MlError::NonFinite);
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(MlError::SingleClass);
    }
    let c = cfg.c;
    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
    let q = |i: usize, j: usize| yf[i] * yf[j] * k[i * n + j];
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut iterations = 0;

    loop {
        // i maximises −y G over I_up, j minimises it over I_low
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let (mut i, mut j) = (usize::MAX, usize::MAX);
        for t in 0..n {
            let v = -yf[t] * grad[t];
            let up = if yf[t] > 0.0 { alpha[t] < c } else { alpha[t] > 0.0 };
            let low = if yf[t] > 0.0 { alpha[t] > 0.0 } else { alpha[t] < c };
            if up && v > gmax {
                gmax = v;
                i = t;
            }
            if low && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < cfg.tol {
            break;
        }
        if iterations >= cfg.max_iter {
            log::warn!("SMO stopped at the iteration cap {} (violation {:.3e})", cfg.max_iter, gmax - gmin);
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if yf[i] != yf[j] {
            let quad = (q(i, i) + q(j, j) + 2.0 * q(i, j)).max(1e-12);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (q(i, i) + q(j, j) - 2.0 * q(i, j)).max(1e-12);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
    }

    // b = −ρ with ρ the mean of y G over free vectors, or the midpoint of the
    // feasible interval when none is free
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free_n) = (0.0, 0usize);
    for t in 0..n {
        let yg = yf[t] * grad[t];
        let at_upper = alpha[t] >= c;
        let at_lower = alpha[t] <= 0.0;
        if at_upper {
            if yf[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower {
            if yf[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free_sum += yg;
            free_n += 1;
        }
    }
    let rho = if free_n > 0 {
        free_sum / free_n as f64
    } else {
        (ub + lb) / 2.0
    };
    let support = (0..n).filter(|&t| alpha[t] > 0.0).collect();
    Ok(SvmModel {
        alphas: alpha,
        support,
        bias: -rho,
        labels: y.to_vec(),
        c,
        iterations,
    })
}

/// `sign(decision)` with zero mapped to `+1`.
pub fn svm_predict(model: &SvmModel, k_row: &[f64]) -> Result<i8, MlError> {
    if k_row.len() != model.labels.len() {
        return Err(MlError::SizeMismatch {
            what: "kernel row",
            expected: model.labels.len(),
            got: k_row.len(),
        });
    }
    Ok(if model.decision(k_row) >= 0.0 { 1 } else { -1 })
}

/// Binary model for the class pair `(neg, pos)` over training rows `indices`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairModel {
    pub pos: usize,
    pub neg: usize,
    pub indices: Vec<usize>,
    pub model: SvmModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVsOneModel {
    pub classes: Vec<usize>,
    pub pairs: Vec<PairModel>,
}

impl OneVsOneModel {
    /// Plurality vote; ties go to the smallest class id.
    pub fn predict(&self, k_row: &[f64]) -> usize {
        let mut votes = vec![0usize; self.classes.len()];
        let pos_of = |c: usize| self.classes.binary_search(&c).expect("known class");
        for p in &self.pairs {
            let row: Vec<f64> = p.indices.iter().map(|&i| k_row[i]).collect();
            let winner = if p.model.decision(&row) >= 0.0 { p.pos } else { p.neg };
            votes[pos_of(winner)] += 1;
        }
        let best = votes.iter().copied().max().unwrap_or(0);
        self.classes[votes.iter().position(|&v| v == best).unwrap_or(0)]
    }
}

/// One binary SVM per class pair; class `a < b` maps `a → +1`, `b → −1`.
pub fn one_vs_one(k: &KernelMatrix, y: &[usize], cfg: &SvmConfig) -> Result<OneVsOneModel, MlError> {
    let n = k.len();
    if y.len() != n {
        return Err(MlError::SizeMismatch {
            what: "labels",
            expected: n,
            got: y.len(),
        });
    }
    let mut classes: Vec<usize> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(MlError::SingleClass);
    }
    let mut pairs = Vec::with_capacity(classes.len() * (classes.len() - 1) / 2);
    for (ai, &a) in classes.iter().enumerate() {
        for &b in &classes[ai + 1..] {
            let indices: Vec<usize> = (0..n).filter(|&i| y[i] == a || y[i] == b).collect();
            let labels: Vec<i8> = indices.iter().map(|&i| if y[i] == a { 1 } else { -1 }).collect();
            let sub = k.select(&indices, &indices);
            let model = svm_train(&sub, &labels, cfg)?;
            pairs.push(PairModel {
                pos: a,
                neg: b,
                indices,
                model,
            });
        }
    }
    Ok(OneVsOneModel { classes, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_pair() {
        let k = [1.0, 0.0, 0.0, 1.0];
        let cfg = SvmConfig {
            c: 10.0,
            ..Default::default()
        };
        let m = svm_train(&k, &[1, -1], &cfg).unwrap();
        assert_eq!(m.support, vec![0, 1]);
        assert_eq!(svm_predict(&m, &[1.0, 0.0]).unwrap(), 1);
        assert_eq!(svm_predict(&m, &[0.0, 1.0]).unwrap(), -1);
        let eq: f64 = m.alphas[0] - m.alphas[1];
        assert!(eq.abs() < 1e-12);
    }

    #[test]
    fn zero_row_follows_bias_sign() {
        let m = SvmModel {
            alphas: vec![0.5, 0.5],
            support: vec![0, 1],
            bias: 0.3,
            labels: vec![1, -1],
            c: 1.0,
            iterations: 0,
        };
        assert_eq!(svm_predict(&m, &[0.0, 0.0]).unwrap(), 1);
        let tie = SvmModel { bias: 0.0, ..m };
        assert_eq!(svm_predict(&tie, &[0.0, 0.0]).unwrap(), 1);
    }

    #[test]
    fn input_validation() {
        let cfg = SvmConfig::default();
        assert!(matches!(svm_train(&[1.0; 4], &[1, 1], &cfg), Err(MlError::SingleClass)));
        assert!(matches!(svm_train(&[1.0; 4], &[1, 2], &cfg), Err(MlError::BadLabel(2))));
        assert!(svm_train(&[1.0; 3], &[1, -1], &cfg).is_err());
        let bad_c = SvmConfig { c: 0.0, ..cfg };
        assert!(svm_train(&[1.0, 0.0, 0.0, 1.0], &[1, -1], &bad_c).is_err());
    }

    #[test]
    fn three_block_classes() {
        let y = [0, 0, 1, 1, 1, 2, 2];
        let n = y.len();
        let values = (0..n * n)
            .map(|e| if y[e / n] == y[e % n] { 1.0 } else { 0.1 })
            .collect();
        let k = KernelMatrix::new((0..n).collect(), values).unwrap();
        let m = one_vs_one(&k, &y, &SvmConfig::default()).unwrap();
        assert_eq!(m.pairs.len(), 3);
        for (i, &label) in y.iter().enumerate() {
            assert_eq!(m.predict(k.row(i)), label);
        }
    }
}
