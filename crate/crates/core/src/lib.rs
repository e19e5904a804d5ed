//! Simulation-based Bayesian inference from differentially private summary
//! statistics.
//!
//! The crate is organized around the pipeline an analyst runs when only a
//! privatized query release is observable:
//!
//! - [`rng`] — deterministic seeded randomness with reproducible substreams
//! - [`prior`] — priors, parameter vectors, and unconstrained transforms
//! - [`simulators`] — confidential-data generators (stochastic SIR,
//!   linear regression, naive-Bayes log-linear) and their summaries
//! - [`privacy`] — privacy mechanisms as deterministic uniform-variate maps,
//!   sensitivity bounds, and a small-domain DP auditor
//! - [`rqmc`] — scrambled digital nets and the nested inner-integral
//!   estimator used inside the training losses
//! - [`flow`] — conditional normalizing flow with rational-quadratic spline
//!   layers, exact log-density, sampling, and gradient-based training
//! - [`inference`] — the SPPE / SPLE / SMC-ABC drivers
//! - [`metrics`] — posterior-quality metrics (MMD, C2ST, NLOG, LMD, KS)
//! - [`datasets`] — bundled observed releases and their mechanism constants
//! - [`harness`] — run configuration, orchestration, and persistence

pub mod datasets;
pub mod error;
pub mod flow;
pub mod harness;
pub mod inference;
pub mod metrics;
pub mod prior;
pub mod privacy;
pub mod rng;
pub mod rqmc;
pub mod simulators;

pub use error::CoreError;
pub use prior::{ParamVector, Prior, PriorBlock};
pub use rng::RngStream;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
