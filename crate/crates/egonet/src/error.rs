use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("ego {ego_id}: duplicate rank {rank}")]
    DuplicateRank { ego_id: String, rank: u32 },

    #[error("no eligible egos ({context})")]
    NoEligibleEgos { context: &'static str },

    #[error("need at least {needed} {what}, got {got}")]
    TooFew {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("all paired differences are zero")]
    ZeroDifferences,

    #[error("{0} is constant, correlation undefined")]
    ConstantInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degree sum is odd; configuration model needs an even number of stubs")]
    OddDegreeSum,

    #[error("rank {rank} out of range 1..={degree}")]
    RankOutOfRange { rank: u32, degree: usize },

    #[error("node {node} out of range (graph has {n_nodes} nodes)")]
    InvalidNode { node: usize, n_nodes: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
