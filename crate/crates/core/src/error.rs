use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for graph with {n_nodes} nodes")]
    NodeOutOfRange { index: usize, n_nodes: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("invalid edge weight {weight} on ({i}, {j}): weights must be finite and >= 0")]
    InvalidWeight { i: usize, j: usize, weight: f64 },

    #[error("duplicate edge ({i}, {j})")]
    DuplicateEdge { i: usize, j: usize },

    #[error("edge ({i}, {j}) listed twice with conflicting weights {first} and {second}")]
    ConflictingWeight {
        i: usize,
        j: usize,
        first: f64,
        second: f64,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "eigensolver did not converge after {iterations} iterations (worst residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("sample size {m} exceeds kernel rank {rank}")]
    SampleSizeExceedsRank { m: usize, rank: usize },

    #[error("kernel basis is not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("numerical breakdown at step {step}: {message}")]
    NumericalBreakdown { step: usize, message: String },

    #[error("sample set contains duplicate node {0}")]
    DuplicateSample(usize),

    #[error("sampled rows are rank deficient: smallest singular value {smallest:e}, largest {largest:e}")]
    RankDeficient { smallest: f64, largest: f64 },

    #[error("combinatorial budget exceeded: {count} subsets > {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
