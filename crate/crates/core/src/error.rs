use thiserror::Error;

/// Formats an optional 1-based source line as a message prefix.
fn at(line: &Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}: "),
        None => String::new(),
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}malformed input: {msg}", at(.line))]
    Malformed { line: Option<usize>, msg: String },

    #[error("{}self-loop on node {node}", at(.line))]
    SelfLoop { line: Option<usize>, node: u64 },

    #[error("{}negative or non-finite weight {weight} on edge ({u}, {v})", at(.line))]
    InvalidWeight {
        line: Option<usize>,
        u: u64,
        v: u64,
        weight: f64,
    },

    #[error("{}duplicate edge ({u}, {v})", at(.line))]
    DuplicateEdge { line: Option<usize>, u: u64, v: u64 },

    #[error("node {node} is outside the graph ({node_count} nodes)")]
    NodeOutOfRange { node: u64, node_count: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("unknown cluster id {0}")]
    UnknownCluster(usize),

    #[error("invalid bi-partition proposal: {0}")]
    InvalidProposal(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph has {nodes} nodes, exhaustive search is limited to {max}")]
    GraphTooLarge { nodes: usize, max: usize },

    #[error("no connected sample for G({m}, {p}) after {retries} attempts")]
    RetryBudgetExhausted { m: usize, p: f64, retries: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
