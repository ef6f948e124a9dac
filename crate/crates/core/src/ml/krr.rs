use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::MlError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrrModel {
    pub weights: Vec<f64>,
    pub lambda: f64,
}

/// Solves `(K + λI) a = y` by Cholesky factorisation.
pub fn krr_train(k: &[f64], y: &[f64], lambda: f64) -> Result<KrrModel, MlError> {
    let n = y.len();
    if k.len() != n * n {
        return Err(MlError::SizeMismatch {
            what: "Gram matrix entries",
            expected: n * n,
            got: k.len(),
        });
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(MlError::BadParameter {
            name: "lambda",
            value: lambda,
        });
    }
    if k.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(MlError::NonFinite);
    }
    let a = DMatrix::from_row_slice(n, n, k) + DMatrix::identity(n, n) * lambda;
    let chol = a.cholesky().ok_or(MlError::NotPositiveDefinite)?;
    let w = chol.solve(&DVector::from_column_slice(y));
    Ok(KrrModel {
        weights: w.iter().copied().collect(),
        lambda,
    })
}

/// `Σ a_i k_i`.
pub fn krr_predict(model: &KrrModel, k_row: &[f64]) -> Result<f64, MlError> {
    if k_row.len() != model.weights.len() {
        return Err(MlError::SizeMismatch {
            what: "kernel row",
            expected: model.weights.len(),
            got: k_row.len(),
        });
    }
    Ok(model.weights.iter().zip(k_row).map(|(a, k)| a * k).sum())
}
