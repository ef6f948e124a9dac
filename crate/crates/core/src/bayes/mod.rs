//! Gaussian-process surrogate models and Bayesian optimisation over a box.

mod covariance;
mod gp;
mod multikernel;
mod optimize;
mod simplex;

use thiserror::Error;

pub use covariance::{matern_bessel, matern_closed_form, matern_kernel, rbf_kernel, CovarianceKind, GpKernel};
pub use gp::{gp_fit, gp_fit_ml, lcb, GpModel};
pub use multikernel::{optimize_multikernel, MultikernelConfig, MultikernelResult};
pub use optimize::{bayes_optimize, read_history, BoConfig, BoResult, Evaluation};
pub use simplex::nelder_mead;

#[derive(Debug, Error)]
pub enum BayesError {
    #[error("Matérn smoothness must be positive, got {0}")]
    BadSmoothness(f64),
    #[error("kernel amplitude must be positive, got {0}")]
    BadAmplitude(f64),
    #[error("{0}")]
    InvalidConfig(String),
    #[error("need at least one observation")]
    NoObservations,
    #[error("observation {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("covariance factorisation failed with jitter up to {jitter:e}")]
    Factorization { jitter: f64 },
    #[error("objective failed at {x:?}: {message}")]
    Objective { x: Vec<f64>, message: String },
    #[error("history file: {0}")]
    History(String),
    #[error(transparent)]
    Ml(#[from] crate::ml::MlError),
    #[error(transparent)]
    Kernel(#[from] crate::kernel::KernelError),
}
