//! Posterior sampling of the GP hyperparameters.

pub mod priors;
pub mod sampler;
pub mod slice;

pub use priors::{
    log_prior_horseshoe, log_prior_mean, log_prior_signal_variance, PriorConfig, SignalVariancePrior,
    HORSESHOE_K,
};
pub use sampler::{fit_surrogate, SamplerConfig, SamplerState, Update};
pub use slice::{slice_sample_univariate, SliceConfig};
