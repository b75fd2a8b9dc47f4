//! The visitor concept and the compound suite that dispatches to it.
//!
//! A visitor is a set of callbacks invoked by the core at fixed points of
//! the search, plus two data structures: one instantiated per search tree
//! and one per tree node. Both live inside the [`Search`] and are reached
//! through [`Search::tree_data`] and [`Search::node_data`], so callbacks
//! take `&self` and may freely re-enter the core.
//!
//! Exactly one visitor in a suite must traverse the tree and exactly one
//! must select target cells. Every other capability may be provided by any
//! number of visitors and runs in registration order.

use std::any::Any;
use std::collections::BTreeMap;
use std::rc::Rc;

use crate::error::CanonError;
use crate::graph::AttributedGraph;
use crate::perm::Permutation;
use crate::search::{NodeId, Search};

/// Registration index of a visitor inside its suite.
pub type VisitorId = usize;

/// Outcome of a refinement call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefineStatus {
    Unchanged,
    Changed,
    /// The node was pruned while refining; remaining refiners are skipped.
    Aborted,
}

impl RefineStatus {
    pub fn merge(self, other: RefineStatus) -> RefineStatus {
        use RefineStatus::*;
        match (self, other) {
            (Aborted, _) | (_, Aborted) => Aborted,
            (Changed, _) | (_, Changed) => Changed,
            _ => Unchanged,
        }
    }
}

#[allow(unused_variables)]
pub trait Visitor {
    fn name(&self) -> &str;

    fn new_tree_data(&self, graph: &AttributedGraph) -> Box<dyn Any> {
        Box::new(())
    }

    fn new_node_data(&self) -> Option<Box<dyn Any>> {
        None
    }

    fn can_traverse(&self) -> bool {
        false
    }

    fn traverse(&self, s: &mut Search<'_>, vid: VisitorId, root: NodeId) -> Result<(), CanonError> {
        Err(CanonError::InvalidSuite(format!("{} cannot traverse", self.name())))
    }

    fn can_select_target_cell(&self) -> bool {
        false
    }

    /// Returns the start position of a non-singleton cell.
    fn select_target_cell(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) -> usize {
        unreachable!("{} does not select target cells", self.name())
    }

    /// Whether this visitor emits node invariants. Enables the coordinator.
    fn emits_invariants(&self) -> bool {
        false
    }

    fn refine(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) -> RefineStatus {
        RefineStatus::Unchanged
    }

    fn refine_abort(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {}

    fn tree_node_create_begin(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {}

    fn tree_node_create_end(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {}

    fn tree_node_destroy(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {}

    fn before_descend(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {}

    /// A refiner created a new cell starting at position `pos`.
    fn new_cell(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId, pos: usize) {}

    /// `leaf` is representationally equal to the canonical leaf; `gamma`
    /// is the derived automorphism, already appended to the generator list.
    fn isomorphic_leaf(&self, s: &mut Search<'_>, vid: VisitorId, leaf: NodeId, gamma: &Permutation) {}

    fn implicit_automorphism(
        &self,
        s: &mut Search<'_>,
        vid: VisitorId,
        node: Option<NodeId>,
        gamma: &Permutation,
        tag: &str,
    ) {
    }

    fn canon_leaf_changed(&self, s: &mut Search<'_>, vid: VisitorId, new: Option<NodeId>, old: Option<NodeId>) {}

    /// A leaf compared greater than the canonical leaf.
    fn leaf_discarded(&self, s: &mut Search<'_>, vid: VisitorId, leaf: NodeId) {}

    /// `node` was flagged by `prune_tree`.
    fn subtree_pruned(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {}

    /// Adds counters from this visitor's tree data to the run report.
    fn report(&self, data: &dyn Any, out: &mut BTreeMap<String, u64>) {}
}

/// An ordered list of visitors with exactly one traversal and exactly one
/// target-cell selector.
#[derive(Clone)]
pub struct VisitorSuite {
    visitors: Rc<[Rc<dyn Visitor>]>,
    traversal: VisitorId,
    selector: VisitorId,
}

impl VisitorSuite {
    pub fn new(visitors: Vec<Rc<dyn Visitor>>) -> Result<Self, CanonError> {
        let find = |pred: &dyn Fn(&dyn Visitor) -> bool, what: &str| -> Result<VisitorId, CanonError> {
            let hits: Vec<usize> = visitors
                .iter()
                .enumerate()
                .filter(|(_, v)| pred(v.as_ref()))
                .map(|(i, _)| i)
                .collect();
            match hits.as_slice() {
                [i] => Ok(*i),
                _ => Err(CanonError::InvalidSuite(format!(
                    "expected exactly one {what}, found {}",
                    hits.len()
                ))),
            }
        };
        let traversal = find(&|v| v.can_traverse(), "tree traversal")?;
        let selector = find(&|v| v.can_select_target_cell(), "target cell selector")?;
        Ok(VisitorSuite {
            visitors: visitors.into(),
            traversal,
            selector,
        })
    }

    pub fn visitors(&self) -> &Rc<[Rc<dyn Visitor>]> {
        &self.visitors
    }

    pub fn traversal(&self) -> VisitorId {
        self.traversal
    }

    pub fn selector(&self) -> VisitorId {
        self.selector
    }

    pub fn names(&self) -> Vec<String> {
        self.visitors.iter().map(|v| v.name().to_string()).collect()
    }

    pub fn len(&self) -> usize {
        self.visitors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visitors.is_empty()
    }
}

impl std::fmt::Debug for VisitorSuite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
