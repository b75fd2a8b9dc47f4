//! One-dimensional Weisfeiler-Leman refinement with edge attributes.
//!
//! A splitter cell `W` assigns every vertex its *attributed degree* toward
//! `W`: the number of edges into `W` per edge attribute, as a sorted list of
//! `(attribute, count)` pairs. Lists compare lexicographically and the empty
//! list is the smallest value. Each touched cell is stably sorted by that
//! value in ascending order and cut wherever the value changes.
//!
//! Graphs whose edges all share one attribute skip the lists and count
//! plain integers, which orders identically.

use std::collections::VecDeque;

use crate::graph::{AttributedGraph, EdgeAttr};
use crate::partition::OrderedPartition;
use crate::search::{NodeId, Search};
use crate::visitor::{RefineStatus, Visitor, VisitorId};

/// Cells with at most this many elements use comparison sort.
const COUNTING_SORT_MIN: usize = 16;

/// Stable ascending order of `keys` (indices into `keys`) plus the cut
/// offsets between distinct values, relative to the segment start.
///
/// Chooses a binary partition when only two values occur, counting sort
/// for larger segments, comparison sort otherwise.
pub fn sort_cell_by_degree(keys: &[u32]) -> (Vec<usize>, Vec<usize>) {
    sort_cell_by_degree_with(keys, true)
}

/// Same as [`sort_cell_by_degree`]; `fast = false` forces the comparison
/// sort, which the differential tests use as the reference.
pub fn sort_cell_by_degree_with(keys: &[u32], fast: bool) -> (Vec<usize>, Vec<usize>) {
    let len = keys.len();
    let (lo, hi) = keys
        .iter()
        .fold((u32::MAX, 0), |(lo, hi), &k| (lo.min(k), hi.max(k)));
    let order: Vec<usize> = if len == 0 || lo == hi {
        (0..len).collect()
    } else if fast && keys.iter().all(|&k| k == lo || k == hi) {
        let mut order: Vec<usize> = (0..len).filter(|&i| keys[i] == lo).collect();
        order.extend((0..len).filter(|&i| keys[i] == hi));
        order
    } else if fast && len > COUNTING_SORT_MIN && ((hi - lo) as usize) < 2 * len {
        let range = (hi - lo) as usize + 1;
        let mut count = vec![0usize; range + 1];
        for &k in keys {
            count[(k - lo) as usize + 1] += 1;
        }
        for i in 1..=range {
            count[i] += count[i - 1];
        }
        let mut order = vec![0; len];
        for (i, &k) in keys.iter().enumerate() {
            let slot = &mut count[(k - lo) as usize];
            order[*slot] = i;
            *slot += 1;
        }
        order
    } else {
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by_key(|&i| keys[i]);
        order
    };
    let cuts = (1..len)
        .filter(|&i| keys[order[i]] != keys[order[i - 1]])
        .collect();
    (order, cuts)
}

/// Splitter queue of cell starts. A start stays a cell start forever, so
/// entries are identified by start plus a stamp for lazy removal.
#[derive(Default)]
struct RefineQueue {
    fifo: VecDeque<(usize, u32)>,
    stamp: Vec<u32>,
    next: u32,
}

impl RefineQueue {
    fn reset(&mut self, n: usize) {
        self.fifo.clear();
        self.stamp.clear();
        self.stamp.resize(n, 0);
        self.next = 0;
    }

    fn contains(&self, start: usize) -> bool {
        self.stamp[start] != 0
    }

    fn push(&mut self, start: usize) {
        self.next += 1;
        self.stamp[start] = self.next;
        self.fifo.push_back((start, self.next));
    }

    fn remove(&mut self, start: usize) {
        self.stamp[start] = 0;
    }

    fn pop(&mut self) -> Option<usize> {
        while let Some((start, st)) = self.fifo.pop_front() {
            if self.stamp[start] == st {
                self.stamp[start] = 0;
                return Some(start);
            }
        }
        None
    }
}

#[derive(Default)]
struct WlState {
    queue: RefineQueue,
    count: Vec<u32>,
    attr_count: Vec<Vec<(EdgeAttr, u32)>>,
    touched: Vec<usize>,
    cell_touched: Vec<bool>,
    fast: bool,
}

/// The WL-1 refinement visitor.
pub struct WlRefiner {
    fast_sort: bool,
}

impl WlRefiner {
    pub fn new() -> Self {
        WlRefiner { fast_sort: true }
    }

    /// A refiner that always uses comparison sort.
    pub fn comparison_sort_only() -> Self {
        WlRefiner { fast_sort: false }
    }
}

impl Default for WlRefiner {
    fn default() -> Self {
        Self::new()
    }
}

impl Visitor for WlRefiner {
    fn name(&self) -> &str {
        "wl1"
    }

    fn new_tree_data(&self, g: &AttributedGraph) -> Box<dyn std::any::Any> {
        Box::new(new_state(g, self.fast_sort))
    }

    fn refine(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) -> RefineStatus {
        let mut st = std::mem::take(s.tree_data::<WlState>(vid));
        let status = refine_node(s, node, &mut st);
        *s.tree_data::<WlState>(vid) = st;
        status
    }
}

/// Access to the partition being refined and to the new-cell event.
trait RefineHost {
    fn pi(&self) -> &OrderedPartition;
    fn pi_mut(&mut self) -> &mut OrderedPartition;
    /// Returns `false` when refinement must stop.
    fn new_cell(&mut self, pos: usize) -> bool;
}

struct NodeHost<'a, 'g> {
    s: &'a mut Search<'g>,
    node: NodeId,
}

impl RefineHost for NodeHost<'_, '_> {
    fn pi(&self) -> &OrderedPartition {
        self.s.partition(self.node)
    }
    fn pi_mut(&mut self) -> &mut OrderedPartition {
        self.s.partition_mut(self.node)
    }
    fn new_cell(&mut self, pos: usize) -> bool {
        self.s.new_cell(self.node, pos)
    }
}

struct PlainHost<'a>(&'a mut OrderedPartition);

impl RefineHost for PlainHost<'_> {
    fn pi(&self) -> &OrderedPartition {
        self.0
    }
    fn pi_mut(&mut self) -> &mut OrderedPartition {
        self.0
    }
    fn new_cell(&mut self, _pos: usize) -> bool {
        true
    }
}

fn new_state(g: &AttributedGraph, fast: bool) -> WlState {
    let n = g.n();
    WlState {
        queue: RefineQueue::default(),
        count: vec![0; n],
        attr_count: if g.has_uniform_edge_attrs() {
            Vec::new()
        } else {
            vec![Vec::new(); n]
        },
        touched: Vec::new(),
        cell_touched: vec![false; n],
        fast,
    }
}

/// Refines `pi` to the coarsest equitable partition below it, using every
/// cell as an initial splitter.
pub fn refine_equitable(g: &AttributedGraph, pi: &mut OrderedPartition) -> RefineStatus {
    let seeds: Vec<usize> = pi.cell_starts().collect();
    refine_with_seeds(g, pi, &seeds)
}

/// Refines `pi` starting from the splitter cells at the given starts.
pub fn refine_with_seeds(g: &AttributedGraph, pi: &mut OrderedPartition, seeds: &[usize]) -> RefineStatus {
    let mut st = new_state(g, true);
    run(g, &mut PlainHost(pi), seeds, &mut st)
}

fn refine_node(s: &mut Search<'_>, node: NodeId, st: &mut WlState) -> RefineStatus {
    let g = s.graph();
    let seeds: Vec<usize> = match s.node(node).individualized_vertex() {
        None => s.partition(node).cell_starts().collect(),
        Some(v) => {
            let p = s.partition(node).position(v);
            vec![p, p + 1]
        }
    };
    run(g, &mut NodeHost { s, node }, &seeds, st)
}

fn run(g: &AttributedGraph, h: &mut impl RefineHost, seeds: &[usize], st: &mut WlState) -> RefineStatus {
    let n = g.n();
    let uniform = g.has_uniform_edge_attrs();
    st.queue.reset(n);
    for &start in seeds {
        st.queue.push(start);
    }
    let mut status = RefineStatus::Unchanged;
    let mut splitter = Vec::new();
    let mut cells = Vec::new();
    let mut keys: Vec<u32> = Vec::new();
    let mut attr_keys: Vec<Vec<(EdgeAttr, u32)>> = Vec::new();
    let mut ranks: Vec<u32> = Vec::new();
    while !h.pi().is_discrete() {
        let Some(w_start) = st.queue.pop() else { break };
        splitter.clear();
        splitter.extend(h.pi().cell(w_start));
        for &w in &splitter {
            for &(x, a) in g.neighbors(w) {
                if st.count[x] == 0 && (uniform || st.attr_count[x].is_empty()) {
                    st.touched.push(x);
                }
                if uniform {
                    st.count[x] += 1;
                } else {
                    let list = &mut st.attr_count[x];
                    match list.binary_search_by_key(&a, |&(b, _)| b) {
                        Ok(i) => list[i].1 += 1,
                        Err(i) => list.insert(i, (a, 1)),
                    }
                }
            }
        }
        cells.clear();
        {
            let pi = h.pi();
            for &x in &st.touched {
                let c = pi.cell_start(x);
                if !st.cell_touched[c] {
                    st.cell_touched[c] = true;
                    cells.push(c);
                }
            }
        }
        cells.sort_unstable();
        let mut aborted = false;
        for &c in &cells {
            st.cell_touched[c] = false;
            if aborted {
                continue;
            }
            let pi = h.pi();
            let len = pi.cell_len(c);
            if len == 1 {
                continue;
            }
            let members: Vec<usize> = pi.cell(c).collect();
            if uniform {
                keys.clear();
                keys.extend(members.iter().map(|&v| st.count[v]));
            } else {
                attr_keys.clear();
                attr_keys.extend(members.iter().map(|&v| st.attr_count[v].clone()));
                let mut distinct: Vec<&Vec<(EdgeAttr, u32)>> = attr_keys.iter().collect();
                distinct.sort();
                distinct.dedup();
                ranks.clear();
                ranks.extend(
                    attr_keys
                        .iter()
                        .map(|k| distinct.binary_search(&k).expect("present") as u32),
                );
                keys.clear();
                keys.extend_from_slice(&ranks);
            }
            let (order, cuts) = sort_cell_by_degree_with(&keys, st.fast);
            if cuts.is_empty() {
                continue;
            }
            let reordered: Vec<usize> = order.iter().map(|&i| members[i]).collect();
            let abs_cuts: Vec<usize> = cuts.iter().map(|&k| c + k).collect();
            let pi = h.pi_mut();
            pi.reorder_cell(c, &reordered);
            pi.cut(c, &abs_cuts);
            status = RefineStatus::Changed;

            let mut frags = Vec::with_capacity(abs_cuts.len() + 1);
            frags.push(c);
            frags.extend_from_slice(&abs_cuts);
            let sizes: Vec<usize> = frags.iter().map(|&f| h.pi().cell_len(f)).collect();
            if st.queue.contains(c) {
                st.queue.remove(c);
                for &f in &frags {
                    st.queue.push(f);
                }
            } else {
                let max = *sizes.iter().max().expect("fragments");
                let skip = sizes.iter().position(|&z| z == max).expect("max exists");
                for (i, &f) in frags.iter().enumerate() {
                    if i != skip || max == 1 {
                        st.queue.push(f);
                    }
                }
            }
            for &pos in &abs_cuts {
                if !h.new_cell(pos) {
                    aborted = true;
                    break;
                }
            }
        }
        for &x in &st.touched {
            st.count[x] = 0;
            if !uniform {
                st.attr_count[x].clear();
            }
        }
        st.touched.clear();
        if aborted {
            return RefineStatus::Aborted;
        }
    }
    status
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stable_sort_example() {
        let (order, cuts) = sort_cell_by_degree(&[1, 0, 1, 0]);
        assert_eq!(order, vec![1, 3, 0, 2]);
        assert_eq!(cuts, vec![2]);
    }

    #[test]
    fn equal_keys_do_not_cut() {
        let (order, cuts) = sort_cell_by_degree(&[3, 3, 3]);
        assert_eq!(order, vec![0, 1, 2]);
        assert!(cuts.is_empty());
    }

    proptest! {
        #[test]
        fn fast_paths_match_comparison_sort(keys in proptest::collection::vec(0u32..40, 0..80)) {
            prop_assert_eq!(sort_cell_by_degree_with(&keys, true), sort_cell_by_degree_with(&keys, false));
        }

        #[test]
        fn binary_keys_match_comparison_sort(keys in proptest::collection::vec(5u32..7, 0..80)) {
            prop_assert_eq!(sort_cell_by_degree_with(&keys, true), sort_cell_by_degree_with(&keys, false));
        }
    }
}
