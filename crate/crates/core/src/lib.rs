//! Quantum evolution (QE) graph kernels.
//!
//! Each graph is encoded in the Hamiltonian of a register of qubits, the
//! register is driven through a layered pulse sequence, and the measured
//! outcome distribution becomes the graph's feature vector. Two graphs are
//! compared through the Jensen-Shannon divergence of their distributions,
//! `K_mu = exp(-mu * JS)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: graphs, TU Dortmund ingestion, random graphs, occupation graphs.
//! - [`analytic`]: closed forms for the depth-1 Ising Ramsey protocol.
//! - [`sim`]: exact statevector simulation (diagonal, Krylov and hardware paths).
//! - [`measure`]: observables, exact and sampled distributions, detection noise.
//! - [`kernel`]: entropy, JS divergence, kernel matrices, multikernel sums.
//! - [`classical`]: random-walk and graphlet-subsampling baselines.
//! - [`ml`]: SMO support vector machines, kernel ridge regression, cross-validation.
//! - [`bayes`]: Gaussian-process Bayesian optimisation and multikernel weights.
//! - [`pipeline`]: end-to-end feature, benchmark, demo and noise-study flows.
//!
//! Data-parallel loops go through [`parallel`], which maps onto rayon when the
//! `parallel` feature is enabled (the default) and onto plain iterators otherwise.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bayes;
pub mod classical;
pub mod graph;
pub mod kernel;
pub mod measure;
pub mod ml;
pub mod parallel;
pub mod pipeline;
pub mod sim;

mod error;

pub use error::{Error, Result};
pub use graph::{Dataset, DegreeHistogram, Graph};
pub use kernel::KernelMatrix;
pub use measure::ProbabilityDistribution;
pub use sim::{PulseSequence, StateVector};
