use thiserror::Error;

use crate::analytic::AnalyticError;
use crate::bayes::BayesError;
use crate::classical::ClassicalError;
use crate::graph::GraphError;
use crate::kernel::KernelError;
use crate::measure::MeasureError;
use crate::ml::MlError;
use crate::sim::SimError;

/// Crate-wide error, wrapping the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Ml(#[from] MlError),
    #[error(transparent)]
    Bayes(#[from] BayesError),
    #[error("{0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
