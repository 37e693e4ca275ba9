//! Centered partition priors: a baseline exchangeable partition prior tilted
//! toward a guessed partition by a variation-of-information penalty, with
//! calibration tools, a generic Gibbs sampler and a Pólya-Gamma logistic
//! model for grouped binary outcomes.

pub mod calibration;
pub mod cp_prior;
pub mod eppf;
pub mod error;
pub mod partitions;
pub mod pg_glm;
pub mod rng;
pub mod sampler;

pub use calibration::{
    estimate_spectrum, local_search, stam_sample, EstimateConfig, LocalSearchResult, StamSampler,
};
pub use cp_prior::{
    choose_psi, cp_log_prob, distance_distribution, exact_spectrum, CpDensity, CpPrior,
    DistanceMasses, DistanceSpectrum, EntryCount, PsiChoice, SpectrumEntry, TailEstimate,
};
pub use pg_glm::{
    fit, sample_pg1, simulate_study, FitConfig, FitOutput, GlmHyper, GroupedBinaryData, SimulationDesign,
};
pub use sampler::{
    penalized_allocation_logweights, posterior_summaries, reseat_sweep, run_chain, ChainConfig,
    ChainOutput, ChainState, Init, LikelihoodModel, PosteriorSummary, SamplingMode,
};
pub use eppf::{conditional_predictive, g_lambda, log_eppf, Candidate, EppfSpec};
pub use error::{Error, Result};
pub use partitions::{
    bell_number, configuration, count_partitions_with_configuration, entropy,
    enumerate_partitions, hasse_neighbors, meet, stirling2, vi_distance, CenterDistance,
    Configuration, SetPartition,
};
