use thiserror::Error;

/// Errors raised while building or comparing graphs.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("expected {expected} vertex attributes, found {found}")]
    AttributeCount { expected: usize, found: usize },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
}

/// Errors from permutation and partition construction.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("not a bijection on 1..={n}")]
    NotBijection { n: usize },
    #[error("malformed cycle notation: {0}")]
    Syntax(String),
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("partition is not discrete")]
    NotDiscrete,
    #[error("empty vertex set")]
    Empty,
}

/// Errors from a canonization run.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("cannot canonize the empty graph")]
    EmptyGraph,
    #[error("invalid visitor suite: {0}")]
    InvalidSuite(String),
    #[error("memory limit of {limit} bytes cannot hold a root-to-leaf path of {needed} nodes ({node_cost} bytes each)")]
    MemoryLimit {
        limit: u64,
        node_cost: u64,
        needed: usize,
    },
    #[error("graph of {n} vertices exceeds the brute-force limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("canonical forms disagree between repetition 0 and repetition {repetition}")]
    Disagreement { repetition: usize },
}
