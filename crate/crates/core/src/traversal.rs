//! Tree traversals: depth-first, breadth-first with experimental paths, and
//! a memory-bounded hybrid of the two.

use std::any::Any;
use std::collections::BTreeMap;

use crate::error::CanonError;
use crate::search::{NodeId, Search};
use crate::visitor::{Visitor, VisitorId};

/// Default integer width, in bytes, of the per-node arrays.
pub const DEFAULT_INT_WIDTH: u64 = 4;
/// Arrays of length `n` held by every tree node.
pub const ARRAYS_PER_NODE: u64 = 4;

/// Estimated bytes per tree node for a graph with `n` vertices.
pub fn node_cost_bytes(n: usize, int_width: u64) -> u64 {
    ARRAYS_PER_NODE * int_width * n as u64
}

/// Number of nodes the breadth-first phase may keep allocated.
pub fn node_budget(limit_bytes: u64, n: usize, int_width: u64) -> usize {
    (limit_bytes / node_cost_bytes(n, int_width).max(1)) as usize
}

struct Frame {
    node: NodeId,
    next: usize,
    owned: bool,
}

/// Depth-first traversal below `root`. When `owned` is set the caller's
/// reference to `root` is released on return. `max_depth` bounds the
/// number of nodes on a root-to-leaf path.
fn depth_first(
    s: &mut Search<'_>,
    root: NodeId,
    owned: bool,
    max_path: Option<(usize, u64, u64)>,
) -> Result<(), CanonError> {
    let mut stack: Vec<Frame> = Vec::new();
    let mut pending = Some((root, owned));
    loop {
        if let Some((node, owned)) = pending.take() {
            if let Some((budget, limit, cost)) = max_path {
                let needed = s.node(node).depth() + 1;
                if needed > budget {
                    if owned {
                        s.release(node);
                    }
                    for f in stack.drain(..).rev() {
                        if f.owned {
                            s.release(f.node);
                        }
                    }
                    return Err(CanonError::MemoryLimit {
                        limit,
                        node_cost: cost,
                        needed,
                    });
                }
            }
            s.before_descend(node);
            if s.is_pruned(node) {
                if owned {
                    s.release(node);
                }
            } else if s.node(node).is_leaf() {
                s.add_leaf(node);
                if owned {
                    s.release(node);
                }
            } else {
                stack.push(Frame { node, next: 0, owned });
            }
        }
        let Some(top) = stack.last_mut() else { break };
        let node = top.node;
        let target = s.node(node).target_cell();
        if top.next == target.len() {
            let f = stack.pop().expect("non-empty");
            if f.owned {
                s.release(f.node);
            }
            continue;
        }
        let w = target[top.next];
        top.next += 1;
        s.before_descend(node);
        if s.is_pruned(node) {
            let f = stack.pop().expect("non-empty");
            if f.owned {
                s.release(f.node);
            }
            continue;
        }
        if s.node(node).child_pruned(w) {
            continue;
        }
        if let Some(existing) = s.node(node).child(w) {
            // materialized by someone else; traverse it without owning it
            s.retain(existing);
            pending = Some((existing, true));
            continue;
        }
        if let Some(child) = s.make_child(node, w) {
            pending = Some((child, true));
        }
    }
    Ok(())
}

/// Depth-first traversal.
#[derive(Default)]
pub struct DepthFirst;

impl Visitor for DepthFirst {
    fn name(&self) -> &str {
        "dfs"
    }

    fn can_traverse(&self) -> bool {
        true
    }

    fn traverse(&self, s: &mut Search<'_>, _vid: VisitorId, root: NodeId) -> Result<(), CanonError> {
        depth_first(s, root, false, None)
    }
}

/// Counters kept by the breadth-first traversals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BreadthFirstStats {
    pub levels: u64,
    pub experimental_paths: u64,
    /// Children handed to depth-first search because of the node budget.
    pub dfs_fallbacks: u64,
    /// Largest allocated-node count observed while creating nodes in
    /// breadth-first mode.
    pub bfs_peak_allocated: usize,
    /// Node budget, or `usize::MAX` without a limit.
    pub budget: usize,
}

/// Breadth-first traversal with one experimental path per level, optionally
/// bounded by a memory limit.
pub struct BreadthFirst {
    memory_limit: Option<u64>,
    int_width: u64,
    paths_per_level: Option<usize>,
}

impl BreadthFirst {
    /// Unbounded breadth-first traversal.
    pub fn new() -> Self {
        BreadthFirst {
            memory_limit: None,
            int_width: DEFAULT_INT_WIDTH,
            paths_per_level: None,
        }
    }

    /// Memory-bounded hybrid: falls back to depth-first search for children
    /// that would exceed the node budget.
    pub fn with_memory_limit(limit_bytes: u64) -> Self {
        BreadthFirst {
            memory_limit: Some(limit_bytes),
            int_width: DEFAULT_INT_WIDTH,
            paths_per_level: None,
        }
    }

    pub fn int_width(mut self, bytes: u64) -> Self {
        self.int_width = bytes.max(1);
        self
    }

    /// Caps the experimental paths started per level. By default every
    /// frontier node that does not lie above the current best leaf gets one,
    /// which finds automorphisms before a level is expanded. `Some(1)` runs
    /// a single path from the leftmost frontier node.
    pub fn paths_per_level(mut self, paths: Option<usize>) -> Self {
        self.paths_per_level = paths.map(|p| p.max(1));
        self
    }
}

impl Default for BreadthFirst {
    fn default() -> Self {
        Self::new()
    }
}

struct Bfs {
    paths_per_level: Option<usize>,
    budget: usize,
    limit: u64,
    cost: u64,
    holds: Vec<NodeId>,
    stats: BreadthFirstStats,
}

impl Bfs {
    fn room(&self, s: &Search<'_>) -> bool {
        s.allocated_nodes() < self.budget
    }

    fn note_bfs_alloc(&mut self, s: &Search<'_>) {
        self.stats.bfs_peak_allocated = self.stats.bfs_peak_allocated.max(s.allocated_nodes());
    }

    /// The first frontier node of a level always starts a path; later ones
    /// only while the per-level cap allows and if the path could reach a
    /// leaf other than the current best one.
    fn wants_path(&self, s: &Search<'_>, x: NodeId, started: usize) -> bool {
        if self.paths_per_level.is_some_and(|cap| started >= cap) {
            return false;
        }
        if started == 0 {
            return true;
        }
        match s.canon_leaf() {
            Some(c) => c != x && s.child_towards(x, c).is_none(),
            None => true,
        }
    }

    fn dfs_path(&self) -> Option<(usize, u64, u64)> {
        (self.budget != usize::MAX).then_some((self.budget, self.limit, self.cost))
    }

    /// Greedy descent from `start`, always taking the first available child.
    fn experimental_path(&mut self, s: &mut Search<'_>, start: NodeId) {
        self.stats.experimental_paths += 1;
        let mut cur = start;
        loop {
            s.before_descend(cur);
            if s.is_pruned(cur) {
                return;
            }
            if s.node(cur).is_leaf() {
                s.add_leaf(cur);
                return;
            }
            let target = s.node(cur).target_cell().to_vec();
            let mut next = None;
            for w in target {
                if s.is_pruned(cur) {
                    return;
                }
                if let Some(c) = s.node(cur).child(w) {
                    if !s.is_pruned(c) {
                        next = Some(c);
                        break;
                    }
                    continue;
                }
                if s.node(cur).child_pruned(w) {
                    continue;
                }
                if !self.room(s) {
                    return;
                }
                if let Some(c) = s.make_child(cur, w) {
                    self.note_bfs_alloc(s);
                    if s.node(c).is_leaf() {
                        s.before_descend(c);
                        if !s.is_pruned(c) {
                            s.add_leaf(c);
                        }
                        s.release(c);
                        return;
                    }
                    self.holds.push(c);
                    next = Some(c);
                    break;
                }
            }
            match next {
                Some(c) => cur = c,
                None => return,
            }
        }
    }

    fn run(&mut self, s: &mut Search<'_>, root: NodeId) -> Result<(), CanonError> {
        s.retain(root);
        let mut frontier = vec![root];
        while !frontier.is_empty() {
            self.stats.levels += 1;
            let depth = s.node(frontier[0]).depth();
            let mut paths = 0;
            let mut next = Vec::new();
            let mut result = Ok(());
            for &x in &frontier {
                if result.is_err() {
                    s.release(x);
                    continue;
                }
                if s.is_pruned(x) {
                    s.release(x);
                    continue;
                }
                if s.node(x).is_leaf() {
                    s.before_descend(x);
                    if !s.is_pruned(x) {
                        s.add_leaf(x);
                    }
                    s.release(x);
                    continue;
                }
                if self.wants_path(s, x, paths) {
                    paths += 1;
                    self.experimental_path(s, x);
                    if s.is_pruned(x) {
                        s.release(x);
                        continue;
                    }
                }
                let target = s.node(x).target_cell().to_vec();
                for w in target {
                    s.before_descend(x);
                    if s.is_pruned(x) {
                        break;
                    }
                    if s.node(x).child_pruned(w) {
                        continue;
                    }
                    if let Some(c) = s.node(x).child(w) {
                        if !s.is_pruned(c) {
                            s.retain(c);
                            next.push(c);
                        }
                        continue;
                    }
                    if self.room(s) {
                        if let Some(c) = s.make_child(x, w) {
                            self.note_bfs_alloc(s);
                            next.push(c);
                        }
                    } else {
                        self.stats.dfs_fallbacks += 1;
                        if let Some(c) = s.make_child(x, w) {
                            if let Err(e) = depth_first(s, c, true, self.dfs_path()) {
                                result = Err(e);
                                break;
                            }
                        }
                    }
                }
                s.release(x);
            }
            let (keep, drop): (Vec<NodeId>, Vec<NodeId>) = self
                .holds
                .drain(..)
                .partition(|&h| s.node(h).depth() > depth + 1 && !s.is_pruned(h));
            for h in drop {
                s.release(h);
            }
            self.holds = keep;
            if let Err(e) = result {
                for c in next {
                    s.release(c);
                }
                self.release_holds(s);
                return Err(e);
            }
            frontier = next;
        }
        self.release_holds(s);
        Ok(())
    }

    fn release_holds(&mut self, s: &mut Search<'_>) {
        for h in std::mem::take(&mut self.holds) {
            s.release(h);
        }
    }
}

impl Visitor for BreadthFirst {
    fn name(&self) -> &str {
        if self.memory_limit.is_some() {
            "bfs-exp-m"
        } else {
            "bfs-exp"
        }
    }

    fn can_traverse(&self) -> bool {
        true
    }

    fn new_tree_data(&self, _g: &crate::AttributedGraph) -> Box<dyn Any> {
        Box::new(BreadthFirstStats::default())
    }

    fn traverse(&self, s: &mut Search<'_>, vid: VisitorId, root: NodeId) -> Result<(), CanonError> {
        let n = s.n();
        let cost = node_cost_bytes(n, self.int_width);
        let (budget, limit) = match self.memory_limit {
            Some(limit) => (node_budget(limit, n, self.int_width), limit),
            None => (usize::MAX, u64::MAX),
        };
        if budget == 0 {
            return Err(CanonError::MemoryLimit {
                limit,
                node_cost: cost,
                needed: 1,
            });
        }
        let mut bfs = Bfs {
            paths_per_level: self.paths_per_level,
            budget,
            limit,
            cost,
            holds: Vec::new(),
            stats: BreadthFirstStats {
                budget,
                ..Default::default()
            },
        };
        bfs.note_bfs_alloc(s);
        let result = bfs.run(s, root);
        *s.tree_data::<BreadthFirstStats>(vid) = bfs.stats;
        result
    }

    fn report(&self, data: &dyn Any, out: &mut BTreeMap<String, u64>) {
        if let Some(st) = data.downcast_ref::<BreadthFirstStats>() {
            out.insert("bfs_levels".into(), st.levels);
            out.insert("bfs_experimental_paths".into(), st.experimental_paths);
            if self.memory_limit.is_some() {
                out.insert("bfs_dfs_fallbacks".into(), st.dfs_fallbacks);
                out.insert("bfs_peak_allocated".into(), st.bfs_peak_allocated as u64);
                out.insert("bfs_budget".into(), st.budget as u64);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_for_1260_vertices_at_two_mebibytes() {
        assert_eq!(node_cost_bytes(1260, 4), 20_160);
        assert_eq!(node_budget(2 * 1024 * 1024, 1260, 4), 104);
    }
}
