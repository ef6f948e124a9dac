//! Kernel machines trained on precomputed Gram matrices.

mod cv;
mod krr;
mod svm;

use thiserror::Error;

pub use cv::{cross_validate, default_c_grid, CvConfig, CvReport, FoldScore};
pub use krr::{krr_predict, krr_train, KrrModel};
pub use svm::{
    one_vs_one, svm_predict, svm_train, OneVsOneModel, PairModel, SvmConfig, SvmModel,
};

#[derive(Debug, Error)]
pub enum MlError {
    #[error("{what}: expected {expected}, got {got}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("all training labels are identical")]
    SingleClass,
    #[error("binary labels must be +1 or -1, got {0}")]
    BadLabel(i64),
    #[error("parameter {name} = {value} is out of range")]
    BadParameter { name: &'static str, value: f64 },
    #[error("non-finite value in the input")]
    NonFinite,
    #[error("(K + λI) is not positive definite")]
    NotPositiveDefinite,
    #[error("{folds} folds for {samples} samples")]
    TooManyFolds { folds: usize, samples: usize },
}
