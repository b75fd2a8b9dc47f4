//! The framework nucleus: reference-counted tree nodes, leaf handling,
//! subtree pruning, and the `canonicalize` entry point.
//!
//! Ownership follows one rule: a node owns its parent, a parent only knows
//! its children by id. Traversals, the canonical-leaf slot and visitors hold
//! further owning references through [`Search::retain`] and
//! [`Search::release`]. When a count drops to zero the node is destroyed,
//! its parent's child slot is cleared and flagged pruned, and the parent
//! reference is released in turn.

use std::any::Any;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::rc::Rc;

use crate::error::CanonError;
use crate::graph::{AdjacencyForm, AttributedGraph, EdgeAttr};
use crate::invariants::{self, BestPath, InvariantValue};
use crate::partition::OrderedPartition;
use crate::perm::{GeneratorSet, Permutation};
use crate::visitor::{RefineStatus, Visitor, VisitorId, VisitorSuite};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One node of the individualization-refinement tree.
pub struct TreeNode {
    parent: Option<NodeId>,
    pi: OrderedPartition,
    individualized: Option<usize>,
    pub(crate) is_pruned: bool,
    target_start: Option<usize>,
    target: Vec<usize>,
    children: Vec<Option<NodeId>>,
    child_pruned: Vec<bool>,
    // set when a child was destroyed after a complete visit
    child_explored: Vec<bool>,
    depth: usize,
    serial: u64,
    refcount: u32,
    data: Vec<Option<Box<dyn Any>>>,
    pub(crate) trace: Vec<(VisitorId, InvariantValue)>,
    pub(crate) trace_leading: bool,
}

impl TreeNode {
    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn partition(&self) -> &OrderedPartition {
        &self.pi
    }

    pub fn individualized_vertex(&self) -> Option<usize> {
        self.individualized
    }

    pub fn is_pruned(&self) -> bool {
        self.is_pruned
    }

    pub fn is_leaf(&self) -> bool {
        self.pi.is_discrete()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Creation order, unique within a run.
    pub fn serial(&self) -> u64 {
        self.serial
    }

    pub fn target_cell_start(&self) -> Option<usize> {
        self.target_start
    }

    /// Target-cell vertices in position order; empty for leaves.
    pub fn target_cell(&self) -> &[usize] {
        &self.target
    }

    /// Index of `w` in the target cell.
    pub fn slot(&self, w: usize) -> usize {
        let start = self.target_start.expect("node has a target cell");
        self.pi.position(w) - start
    }

    pub fn child(&self, w: usize) -> Option<NodeId> {
        self.children[self.slot(w)]
    }

    pub fn child_pruned(&self, w: usize) -> bool {
        self.child_pruned[self.slot(w)]
    }

    /// `true` when the child for `w` was visited completely and released.
    pub fn child_explored(&self, w: usize) -> bool {
        self.child_explored[self.slot(w)]
    }

    pub fn trace(&self) -> &[(VisitorId, InvariantValue)] {
        &self.trace
    }
}

#[derive(Default)]
struct Tree {
    slots: Vec<Option<TreeNode>>,
    free: Vec<u32>,
    allocated: usize,
    created: u64,
    peak: usize,
}

impl Tree {
    fn alloc(&mut self, node: TreeNode) -> NodeId {
        self.allocated += 1;
        self.created += 1;
        self.peak = self.peak.max(self.allocated);
        match self.free.pop() {
            Some(i) => {
                self.slots[i as usize] = Some(node);
                NodeId(i)
            }
            None => {
                self.slots.push(Some(node));
                NodeId(self.slots.len() as u32 - 1)
            }
        }
    }

    fn get(&self, id: NodeId) -> &TreeNode {
        self.slots[id.index()].as_ref().expect("access to destroyed tree node")
    }

    fn get_mut(&mut self, id: NodeId) -> &mut TreeNode {
        self.slots[id.index()].as_mut().expect("access to destroyed tree node")
    }

    fn free(&mut self, id: NodeId) -> TreeNode {
        self.allocated -= 1;
        self.free.push(id.0);
        self.slots[id.index()].take().expect("double free of tree node")
    }
}

/// Counters and results of one canonization run.
pub struct RunReport {
    /// Maps every input vertex to its canonical index.
    pub canonical: Permutation,
    /// Adjacency form of the canonical graph.
    pub canonical_form: AdjacencyForm,
    pub nodes_created: u64,
    pub max_allocated: usize,
    /// Nodes still allocated after the run; zero unless something leaked.
    pub leaked_nodes: usize,
    /// Every automorphism reported during the run, explicit and implicit.
    pub generators: Vec<Permutation>,
    pub stats: BTreeMap<String, u64>,
    visitor_names: Vec<String>,
    visitor_data: Vec<Box<dyn Any>>,
}

impl RunReport {
    /// Tree data of the first visitor whose data has type `T`.
    pub fn visitor_data<T: 'static>(&self) -> Option<&T> {
        self.visitor_data.iter().find_map(|d| d.downcast_ref::<T>())
    }

    pub fn visitor_names(&self) -> &[String] {
        &self.visitor_names
    }
}

impl std::fmt::Debug for RunReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RunReport")
            .field("canonical", &self.canonical)
            .field("nodes_created", &self.nodes_created)
            .field("max_allocated", &self.max_allocated)
            .field("generators", &self.generators.len())
            .field("stats", &self.stats)
            .finish()
    }
}

/// State of one canonization run, handed to every visitor callback.
pub struct Search<'g> {
    graph: &'g AttributedGraph,
    tree: Tree,
    visitors: Rc<[Rc<dyn Visitor>]>,
    selector: VisitorId,
    tree_data: Vec<Box<dyn Any>>,
    canon_leaf: Option<NodeId>,
    canon_form: Option<AdjacencyForm>,
    scratch: Vec<(usize, EdgeAttr)>,
    automorphisms: GeneratorSet,
    pub(crate) best_path: Option<BestPath>,
}

impl<'g> Search<'g> {
    fn new(graph: &'g AttributedGraph, suite: &VisitorSuite) -> Self {
        let visitors = suite.visitors().clone();
        let tree_data = visitors.iter().map(|v| v.new_tree_data(graph)).collect();
        let best_path = visitors
            .iter()
            .any(|v| v.emits_invariants())
            .then(BestPath::default);
        Search {
            graph,
            tree: Tree::default(),
            visitors,
            selector: suite.selector(),
            tree_data,
            canon_leaf: None,
            canon_form: None,
            scratch: Vec::new(),
            automorphisms: GeneratorSet::new(),
            best_path,
        }
    }

    pub fn graph(&self) -> &'g AttributedGraph {
        self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        self.tree.get(id)
    }

    pub fn is_alive(&self, id: NodeId, serial: u64) -> bool {
        matches!(self.tree.slots.get(id.index()), Some(Some(n)) if n.serial == serial)
    }

    pub fn partition(&self, id: NodeId) -> &OrderedPartition {
        &self.tree.get(id).pi
    }

    /// Mutable partition access for refiners.
    pub fn partition_mut(&mut self, id: NodeId) -> &mut OrderedPartition {
        &mut self.tree.get_mut(id).pi
    }

    pub fn is_pruned(&self, id: NodeId) -> bool {
        self.tree.get(id).is_pruned
    }

    /// Marks a node under construction as pruned.
    pub fn mark_pruned(&mut self, id: NodeId) {
        self.tree.get_mut(id).is_pruned = true;
    }

    pub fn set_child_pruned(&mut self, id: NodeId, w: usize) {
        let node = self.tree.get_mut(id);
        let slot = node.slot(w);
        node.child_pruned[slot] = true;
    }

    pub fn canon_leaf(&self) -> Option<NodeId> {
        self.canon_leaf
    }

    pub fn automorphisms(&self) -> &GeneratorSet {
        &self.automorphisms
    }

    pub fn allocated_nodes(&self) -> usize {
        self.tree.allocated
    }

    pub fn nodes_created(&self) -> u64 {
        self.tree.created
    }

    /// Vertices individualized on the path from the root to `id`.
    pub fn individualization_sequence(&self, id: NodeId) -> Vec<usize> {
        let mut seq = Vec::new();
        let mut cur = Some(id);
        while let Some(c) = cur {
            let node = self.tree.get(c);
            if let Some(v) = node.individualized {
                seq.push(v);
            }
            cur = node.parent;
        }
        seq.reverse();
        seq
    }

    pub fn tree_data<T: 'static>(&mut self, vid: VisitorId) -> &mut T {
        self.tree_data[vid]
            .downcast_mut::<T>()
            .expect("tree data type matches its visitor")
    }

    pub fn node_data<T: 'static>(&mut self, vid: VisitorId, id: NodeId) -> &mut T {
        self.tree.get_mut(id).data[vid]
            .as_mut()
            .and_then(|d| d.downcast_mut::<T>())
            .expect("node data type matches its visitor")
    }

    pub fn node_data_ref<T: 'static>(&self, vid: VisitorId, id: NodeId) -> &T {
        self.tree.get(id).data[vid]
            .as_ref()
            .and_then(|d| d.downcast_ref::<T>())
            .expect("node data type matches its visitor")
    }

    fn dispatch(&mut self, mut f: impl FnMut(&dyn Visitor, &mut Search<'g>, VisitorId)) {
        let visitors = self.visitors.clone();
        for (vid, v) in visitors.iter().enumerate() {
            f(v.as_ref(), self, vid);
        }
    }

    pub fn retain(&mut self, id: NodeId) {
        self.tree.get_mut(id).refcount += 1;
    }

    /// Drops one owning reference; destroys the node (and possibly its
    /// ancestors) when the count reaches zero.
    pub fn release(&mut self, id: NodeId) {
        let mut cur = Some(id);
        while let Some(c) = cur.take() {
            let node = self.tree.get_mut(c);
            node.refcount -= 1;
            if node.refcount > 0 {
                break;
            }
            self.dispatch(|v, s, vid| v.tree_node_destroy(s, vid, c));
            let node = self.tree.free(c);
            if let Some(p) = node.parent {
                let w = node.individualized.expect("non-root node has an individualized vertex");
                let explored = !node.is_pruned;
                let parent = self.tree.get_mut(p);
                if parent.target_start.is_some() {
                    let slot = parent.slot(w);
                    if parent.children[slot] == Some(c) || parent.children[slot].is_none() {
                        parent.children[slot] = None;
                        parent.child_pruned[slot] = true;
                        parent.child_explored[slot] |= explored;
                    }
                }
                cur = Some(p);
            }
        }
    }

    fn make_tree_node(
        &mut self,
        parent: Option<NodeId>,
        pi: OrderedPartition,
        individualized: Option<usize>,
    ) -> Option<NodeId> {
        let depth = parent.map_or(0, |p| self.tree.get(p).depth + 1);
        let data = self.visitors.iter().map(|v| v.new_node_data()).collect();
        let serial = self.tree.created;
        let id = self.tree.alloc(TreeNode {
            parent,
            pi,
            individualized,
            is_pruned: false,
            target_start: None,
            target: Vec::new(),
            children: Vec::new(),
            child_pruned: Vec::new(),
            child_explored: Vec::new(),
            depth,
            serial,
            refcount: 1,
            data,
            trace: Vec::new(),
            trace_leading: false,
        });
        if let Some(p) = parent {
            self.retain(p);
        }
        self.dispatch(|v, s, vid| v.tree_node_create_begin(s, vid, id));
        if !self.is_pruned(id) {
            self.refine(id);
            if !self.is_pruned(id) && !self.partition(id).is_discrete() {
                let selector = self.visitors[self.selector].clone();
                let start = selector.select_target_cell(self, self.selector, id);
                let node = self.tree.get_mut(id);
                debug_assert!(node.pi.cell_len(start) > 1, "target cell must be non-singleton");
                node.target = node.pi.cell(start).collect();
                let k = node.target.len();
                node.target_start = Some(start);
                node.children = vec![None; k];
                node.child_pruned = vec![false; k];
                node.child_explored = vec![false; k];
            }
        }
        self.dispatch(|v, s, vid| v.tree_node_create_end(s, vid, id));
        if !self.is_pruned(id) {
            invariants::finalize_node(self, id);
        }
        if self.is_pruned(id) {
            self.release(id);
            None
        } else {
            Some(id)
        }
    }

    /// Runs every refiner in registration order, stopping early when the
    /// node becomes pruned.
    fn refine(&mut self, id: NodeId) -> RefineStatus {
        let visitors = self.visitors.clone();
        let mut status = RefineStatus::Unchanged;
        for (vid, v) in visitors.iter().enumerate() {
            status = status.merge(v.refine(self, vid, id));
            if self.is_pruned(id) {
                status = RefineStatus::Aborted;
                self.dispatch(|v, s, vid| v.refine_abort(s, vid, id));
                break;
            }
        }
        status
    }

    /// Reports a new cell to every visitor. Returns `false` when the node
    /// became pruned, in which case the refiner must stop.
    pub fn new_cell(&mut self, id: NodeId, pos: usize) -> bool {
        self.dispatch(|v, s, vid| v.new_cell(s, vid, id, pos));
        !self.is_pruned(id)
    }

    /// Invokes `before_descend` on every visitor.
    pub fn before_descend(&mut self, id: NodeId) {
        self.dispatch(|v, s, vid| v.before_descend(s, vid, id));
    }

    /// Creates the child of `parent` that individualizes `w`. The returned
    /// node carries one owning reference for the caller.
    pub fn make_child(&mut self, parent: NodeId, w: usize) -> Option<NodeId> {
        let node = self.tree.get(parent);
        let slot = node.slot(w);
        assert!(!node.child_pruned[slot], "child {} is pruned", w + 1);
        assert!(node.children[slot].is_none(), "child {} already exists", w + 1);
        let mut pi = node.pi.clone();
        pi.individualize(w).expect("target-cell vertex lies in a non-singleton cell");
        let child = self.make_tree_node(Some(parent), pi, Some(w));
        let node = self.tree.get_mut(parent);
        match child {
            Some(c) => node.children[slot] = Some(c),
            None => node.child_pruned[slot] = true,
        }
        child
    }

    /// Compares a discrete node against the canonical leaf and updates it.
    pub fn add_leaf(&mut self, leaf: NodeId) {
        debug_assert!(self.partition(leaf).is_discrete());
        let Some(canon) = self.canon_leaf else {
            self.adopt_canon_leaf(leaf);
            return;
        };
        if canon == leaf {
            return;
        }
        let ord = {
            let pi = &self.tree.get(leaf).pi;
            let form = self.canon_form.as_ref().expect("cached form of the canonical leaf");
            let vertex_at: Vec<usize> = pi.elements().iter().map(|&v| v as usize).collect();
            let index_of: Vec<usize> = (0..pi.n()).map(|v| pi.position(v)).collect();
            form.compare_permuted(self.graph, &vertex_at, &index_of, &mut self.scratch)
        };
        match ord {
            Ordering::Less => self.adopt_canon_leaf(leaf),
            Ordering::Greater => self.dispatch(|v, s, vid| v.leaf_discarded(s, vid, leaf)),
            Ordering::Equal => {
                // γ = π̄_c π_a
                let pc = self.partition(canon).as_permutation().expect("discrete");
                let pa = self.partition(leaf).as_permutation().expect("discrete");
                let gamma = pc.inverse().compose(&pa).expect("same size");
                if gamma.is_identity() {
                    return;
                }
                debug_assert!(self.graph.is_automorphism(&gamma));
                self.automorphisms.push(gamma.clone());
                self.dispatch(|v, s, vid| v.isomorphic_leaf(s, vid, leaf, &gamma));
            }
        }
    }

    fn adopt_canon_leaf(&mut self, leaf: NodeId) {
        let pi = &self.tree.get(leaf).pi;
        let form = AdjacencyForm::of_permuted(self.graph, |i| pi.vertex_at(i), |v| pi.position(v));
        self.retain(leaf);
        let old = self.canon_leaf.replace(leaf);
        self.canon_form = Some(form);
        self.dispatch(|v, s, vid| v.canon_leaf_changed(s, vid, Some(leaf), old));
        if let Some(o) = old {
            self.release(o);
        }
    }

    /// Forgets the canonical leaf.
    pub fn invalidate_canon_leaf(&mut self) {
        if let Some(old) = self.canon_leaf.take() {
            self.canon_form = None;
            self.dispatch(|v, s, vid| v.canon_leaf_changed(s, vid, None, Some(old)));
            self.release(old);
        }
    }

    /// Flags `root` and its materialized subtree as pruned. Nothing is
    /// deallocated here.
    pub fn prune_tree(&mut self, root: NodeId) {
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            let was_pruned = self.tree.get(id).is_pruned;
            self.tree.get_mut(id).is_pruned = true;
            if !was_pruned {
                self.dispatch(|v, s, vid| v.subtree_pruned(s, vid, id));
            }
            if self.partition(id).is_discrete() {
                if self.canon_leaf == Some(id) {
                    self.invalidate_canon_leaf();
                }
                continue;
            }
            let node = self.tree.get_mut(id);
            for slot in 0..node.child_pruned.len() {
                node.child_pruned[slot] = true;
                if let Some(c) = node.children[slot] {
                    stack.push(c);
                }
            }
        }
    }

    /// Records an implicit automorphism and forwards it to every visitor.
    pub fn report_implicit_automorphism(&mut self, node: Option<NodeId>, gamma: Permutation, tag: &str) {
        if gamma.is_identity() {
            return;
        }
        debug_assert!(self.graph.is_automorphism(&gamma), "{tag} reported a non-automorphism {gamma}");
        self.automorphisms.push(gamma.clone());
        self.dispatch(|v, s, vid| v.implicit_automorphism(s, vid, node, &gamma, tag));
    }

    /// Emits a node invariant value; see [`crate::invariants`].
    pub fn emit_invariant(&mut self, node: NodeId, vid: VisitorId, value: InvariantValue) -> Ordering {
        invariants::emit(self, node, vid, value)
    }

    /// The child of `ancestor` on the path down to `descendant`, if
    /// `descendant` lies strictly below `ancestor`.
    pub fn child_towards(&self, ancestor: NodeId, descendant: NodeId) -> Option<NodeId> {
        let target_depth = self.node(ancestor).depth + 1;
        let mut cur = descendant;
        if self.node(cur).depth < target_depth {
            return None;
        }
        while self.node(cur).depth > target_depth {
            cur = self.node(cur).parent?;
        }
        (self.node(cur).parent == Some(ancestor)).then_some(cur)
    }

    pub(crate) fn node_trace_push(&mut self, id: NodeId, pair: (VisitorId, InvariantValue)) {
        self.tree.get_mut(id).trace.push(pair);
    }

    pub(crate) fn set_trace_leading(&mut self, id: NodeId) {
        self.tree.get_mut(id).trace_leading = true;
    }

    pub(crate) fn tree_data_boxes(self) -> Vec<Box<dyn Any>> {
        self.tree_data
    }
}

/// Canonizes `graph` with the given suite. The returned permutation maps
/// input vertices to canonical indices; `graph.permuted(&report.canonical)`
/// is the canonical form.
pub fn canonicalize(graph: &AttributedGraph, suite: &VisitorSuite) -> Result<RunReport, CanonError> {
    if graph.n() == 0 {
        return Err(CanonError::EmptyGraph);
    }
    let mut s = Search::new(graph, suite);
    let pi0 = OrderedPartition::initial(graph).expect("non-empty graph");
    let root = s
        .make_tree_node(None, pi0, None)
        .ok_or_else(|| CanonError::InvalidSuite("root node was pruned".into()))?;
    let traversal = s.visitors[suite.traversal()].clone();
    traversal.traverse(&mut s, suite.traversal(), root)?;
    let canon = s
        .canon_leaf
        .ok_or_else(|| CanonError::InvalidSuite("search finished without a canonical leaf".into()))?;
    let canonical = s.partition(canon).as_permutation().expect("discrete").inverse();
    let canonical_form = s.canon_form.clone().expect("cached canonical form");
    s.release(root);
    if let Some(leaf) = s.canon_leaf.take() {
        s.canon_form = None;
        s.release(leaf);
    }
    let leaked_nodes = s.tree.allocated;
    debug_assert_eq!(leaked_nodes, 0, "tree nodes leaked");
    let nodes_created = s.tree.created;
    let max_allocated = s.tree.peak;
    let generators = std::mem::take(&mut s.automorphisms).into_vec();
    let mut stats = BTreeMap::new();
    invariants::report(&s, &mut stats);
    let visitors = s.visitors.clone();
    let visitor_data = s.tree_data_boxes();
    stats.insert("nodes_created".to_string(), nodes_created);
    stats.insert("max_allocated".to_string(), max_allocated as u64);
    stats.insert("generators".to_string(), generators.len() as u64);
    for (v, d) in visitors.iter().zip(&visitor_data) {
        v.report(d.as_ref(), &mut stats);
    }
    Ok(RunReport {
        canonical,
        canonical_form,
        nodes_created,
        max_allocated,
        leaked_nodes,
        generators,
        stats,
        visitor_names: visitors.iter().map(|v| v.name().to_string()).collect(),
        visitor_data,
    })
}
