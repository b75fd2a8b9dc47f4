//! Graph canonization by individualization-refinement, assembled from
//! composable visitors.
//!
//! ```
//! use graphcanon::{canonicalize, AttributedGraph, RunConfig};
//!
//! let g = AttributedGraph::from_edges_1based(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
//! let h = AttributedGraph::from_edges_1based(4, &[(2, 4), (4, 1), (1, 3)]).unwrap();
//! let suite = RunConfig::default().suite().unwrap();
//! let cg = g.permuted(&canonicalize(&g, &suite).unwrap().canonical).unwrap();
//! let ch = h.permuted(&canonicalize(&h, &suite).unwrap().canonical).unwrap();
//! assert!(cg.repr_eq(&ch));
//! ```

pub mod aut;
pub mod dimacs;
pub mod error;
pub mod gen;
pub mod graph;
pub mod invariants;
pub mod oracle;
pub mod partition;
pub mod perm;
pub mod refine;
pub mod runner;
pub mod search;
pub mod stats;
pub mod target_cell;
pub mod traversal;
pub mod visitor;

pub use error::{CanonError, GraphError, PermError};
pub use graph::{AdjacencyForm, AttributedGraph, EdgeAttr, VertexAttr};
pub use partition::OrderedPartition;
pub use runner::{relabeled_runs, run_repetitions, InvariantSet, RunConfig, TraversalKind};
pub use perm::{GeneratorSet, OrbitPartition, Permutation};
pub use search::{canonicalize, NodeId, RunReport, Search, TreeNode};
pub use target_cell::CellSelector;
pub use visitor::{RefineStatus, Visitor, VisitorId, VisitorSuite};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/refinement.md")]
    mod refinement {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/visitors.md")]
    mod visitors {}
    #[doc = include_str!("../../../book/src/traversals.md")]
    mod traversals {}
    #[doc = include_str!("../../../book/src/invariants.md")]
    mod invariants {}
    #[doc = include_str!("../../../book/src/automorphisms.md")]
    mod automorphisms {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
