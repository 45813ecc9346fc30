//! Simultaneous prediction intervals for overdispersed multinomial counts.
//!
//! Given historical control data (K studies, C categories), the crate fits a
//! quasi-multinomial model and builds intervals `[L_c, U_c]` meant to contain
//! every category count of a future study of size `m` jointly with
//! probability `1 - alpha`:
//!
//! * normal approximations: pointwise, Bonferroni, multivariate normal;
//! * parametric bootstrap: symmetric, asymmetric and marginal calibration,
//!   max-absolute-studentized-residual, rank-based simultaneous sets;
//! * a Dirichlet-multinomial hierarchical model sampled by MCMC, with
//!   marginal-quantile, mean-centered and rank-based predictive intervals.
//!
//! [`sim`] measures empirical simultaneous coverage and tail balance.
//!
//! The model, interval and bootstrap arithmetic is generic over [`Real`]
//! (`f32`, `f64`); the `*64` aliases below are what the CLI uses.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotic;
pub mod bayes;
pub mod bootstrap;
pub mod dm;
pub mod error;
pub mod interval;
pub mod io;
pub mod methods;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use interval::PredictionIntervalSet;
pub use methods::{compute_intervals, Method, MethodSettings, PriorKind};
pub use model::{fit_model, FutureSpec, HistoricalDataset, ModelFit, PredictionPoint};
pub use rng::RngStream;
pub use scalar::Real;

pub type ModelFit64 = ModelFit<f64>;
pub type ModelFit32 = ModelFit<f32>;
pub type PredictionPoint64 = PredictionPoint<f64>;
pub type PredictionIntervalSet64 = PredictionIntervalSet<f64>;
pub type PredictionIntervalSet32 = PredictionIntervalSet<f32>;
pub type BootstrapEnsemble64 = bootstrap::BootstrapEnsemble<f64>;
pub type BootstrapEnsemble32 = bootstrap::BootstrapEnsemble<f32>;
