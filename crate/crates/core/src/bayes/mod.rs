//! Dirichlet-multinomial hierarchical model.
//!
//! The study-level probabilities are integrated out, so the sampler works on
//! the `C`-dimensional marginal posterior of `(pi_global, eta0)`.

pub mod density;
pub mod intervals;
pub mod mcmc;
pub mod predictive;

pub use density::{dm_log_pmf, LogPosterior, PriorChoice};
pub use intervals::{bayes_bonferroni_interval, bayes_mean_centered_interval, bayes_rank_scs_interval};
pub use mcmc::{mcmc_sample, McmcSettings, PosteriorDraws};
pub use predictive::{posterior_predictive, PredictiveSamples};
