use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("partition labels must be nonempty")]
    EmptyLabels,

    #[error("partitions have different numbers of items ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("Stirling number S({n}, {k}) requested with k > n")]
    StirlingRange { n: usize, k: usize },

    #[error("enumeration of {n} items exceeds the cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("invalid partition text `{text}`: {reason}")]
    ParsePartition { text: String, reason: String },

    #[error("invalid EPPF parameters: {0}")]
    EppfParameters(String),

    #[error("partition has {k} blocks but the finite family allows at most {kappa}")]
    TooManyBlocks { k: usize, kappa: usize },

    #[error("cluster index {index} out of range ({available} candidates)")]
    ClusterOutOfRange { index: usize, available: usize },

    #[error("invalid penalty psi = {0}")]
    InvalidPsi(f64),

    #[error("distance spectrum does not match the prior: {0}")]
    SpectrumMismatch(String),

    #[error("operation needs a fully enumerated spectrum")]
    SpectrumNotExact,

    #[error("malformed spectrum file: {0}")]
    SpectrumFormat(String),

    #[error("local search exceeded {limit} explored partitions; last completed depth {completed_depth}")]
    ExplorationBudget { limit: usize, completed_depth: usize },

    #[error("target mass {target} unattainable within psi <= {psi_max}; best F(delta*) = {supremum}")]
    Unattainable { target: f64, psi_max: f64, supremum: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid chain configuration: {0}")]
    ChainConfig(String),

    #[error("likelihood evaluation failed for item {item}")]
    Likelihood { item: usize },

    #[error("model does not support the requested sampling mode: {0}")]
    UnsupportedMode(&'static str),

    #[error("posterior precision for cluster {cluster} is not positive definite")]
    NotPositiveDefinite { cluster: usize },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("no samples to summarize")]
    EmptySamples,
}
