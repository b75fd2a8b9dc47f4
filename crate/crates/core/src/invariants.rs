//! Node invariants and the coordinator that turns them into pruning.
//!
//! Every node carries a trace of `(visitor id, value)` pairs emitted while
//! it is created. A root-to-leaf path is ranked by the sequence of its node
//! traces, compared lexicographically depth by depth; within one depth a
//! shorter trace that is a prefix of another ranks first, and a leaf ranks
//! before an inner node with an equal trace. The canonical leaf is the
//! smallest leaf, under the representation order, among the leaves of
//! minimum path rank.
//!
//! The coordinator keeps the best known prefix per depth together with the
//! nodes that currently match it. An emission that is worse than the best
//! value at the same index prunes the emitting node; one that is better
//! discards the old best from that depth downward, pruning the matching
//! nodes and the canonical leaf.
//!
//! Values are plain integer sequences compared structurally; nothing is
//! hashed, so invariant pruning never merges distinct traces.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::search::{NodeId, Search};
use crate::visitor::{Visitor, VisitorId};

/// An invariant value. Visitors choose their own encoding; it must depend
/// only on positions and attributes, never on vertex names.
pub type InvariantValue = Vec<u64>;

struct DepthEntry {
    trace: Vec<(VisitorId, InvariantValue)>,
    terminal: bool,
    members: Vec<(NodeId, u64)>,
}

/// The best path-invariant prefix known so far, one entry per depth.
#[derive(Default)]
pub struct BestPath {
    entries: Vec<DepthEntry>,
    improvements: u64,
    invariant_prunes: u64,
}

impl BestPath {
    pub fn depth(&self) -> usize {
        self.entries.len()
    }
}

fn discard_from(s: &mut Search<'_>, depth: usize) {
    let bp = s.best_path.as_mut().expect("coordinator enabled");
    let dropped: Vec<(NodeId, u64)> = bp
        .entries
        .drain(depth.min(bp.entries.len())..)
        .flat_map(|e| e.members)
        .collect();
    bp.improvements += 1;
    for (id, serial) in dropped {
        if s.is_alive(id, serial) && !s.is_pruned(id) {
            s.prune_tree(id);
        }
    }
    s.invalidate_canon_leaf();
}

fn reject(s: &mut Search<'_>, node: NodeId) -> Ordering {
    s.mark_pruned(node);
    s.best_path.as_mut().expect("coordinator enabled").invariant_prunes += 1;
    Ordering::Greater
}

pub(crate) fn emit(s: &mut Search<'_>, node: NodeId, vid: VisitorId, value: InvariantValue) -> Ordering {
    if s.best_path.is_none() {
        return Ordering::Equal;
    }
    let (depth, k, leading) = {
        let n = s.node(node);
        (n.depth(), n.trace.len(), n.trace_leading)
    };
    let pair = (vid, value);
    let cmp = if leading {
        Ordering::Less
    } else {
        let bp = s.best_path.as_ref().unwrap();
        match bp.entries.len().cmp(&depth) {
            Ordering::Less => return reject(s, node),
            Ordering::Equal => Ordering::Less,
            Ordering::Greater => match bp.entries[depth].trace.get(k) {
                None => Ordering::Greater,
                Some(best) => pair.cmp(best),
            },
        }
    };
    s.node_trace_push(node, pair);
    match cmp {
        Ordering::Greater => reject(s, node),
        Ordering::Less => {
            if !leading {
                let first = s.best_path.as_ref().unwrap().entries.len() == depth;
                if !first {
                    discard_from(s, depth);
                }
                s.set_trace_leading(node);
            }
            Ordering::Less
        }
        Ordering::Equal => Ordering::Equal,
    }
}

/// Registers a node that completed creation without being pruned.
pub(crate) fn finalize_node(s: &mut Search<'_>, node: NodeId) {
    if s.best_path.is_none() {
        return;
    }
    let (depth, leading, is_leaf, serial, len) = {
        let n = s.node(node);
        (n.depth(), n.trace_leading, n.is_leaf(), n.serial(), n.trace.len())
    };
    let bp = s.best_path.as_ref().unwrap();
    let cmp = if leading {
        Ordering::Less
    } else if bp.entries.len() < depth {
        reject(s, node);
        return;
    } else if bp.entries.len() == depth {
        Ordering::Less
    } else {
        let best = &bp.entries[depth];
        len.cmp(&best.trace.len()).then(best.terminal.cmp(&is_leaf))
    };
    match cmp {
        Ordering::Greater => {
            reject(s, node);
        }
        Ordering::Less => {
            let bp = s.best_path.as_ref().unwrap();
            if !leading && bp.entries.len() > depth {
                discard_from(s, depth);
            } else if is_leaf && bp.entries.len() > depth + 1 {
                discard_from(s, depth + 1);
            }
            let trace = s.node(node).trace.clone();
            let bp = s.best_path.as_mut().unwrap();
            bp.entries.truncate(depth);
            bp.entries.push(DepthEntry {
                trace,
                terminal: is_leaf,
                members: vec![(node, serial)],
            });
        }
        Ordering::Equal => {
            let deeper = s.best_path.as_ref().unwrap().entries.len() > depth + 1;
            if is_leaf && deeper {
                // a leaf ends its path here; longer paths rank after it
                discard_from(s, depth + 1);
            }
            let bp = s.best_path.as_mut().unwrap();
            bp.entries[depth].members.push((node, serial));
        }
    }
}

pub(crate) fn report(s: &Search<'_>, out: &mut BTreeMap<String, u64>) {
    if let Some(bp) = &s.best_path {
        out.insert("invariant_improvements".into(), bp.improvements);
        out.insert("invariant_prunes".into(), bp.invariant_prunes);
    }
}

/// Cell-splitting trace: the position of every new cell, in the order the
/// refiners report them.
pub struct TraceInvariant;

impl Visitor for TraceInvariant {
    fn name(&self) -> &str {
        "invariant-t"
    }

    fn emits_invariants(&self) -> bool {
        true
    }

    fn new_cell(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId, pos: usize) {
        if !s.is_pruned(node) {
            s.emit_invariant(node, vid, vec![pos as u64 + 1]);
        }
    }
}

/// Quotient-graph trace, emitted once per node after refinement.
///
/// For every pair of cells `i <= j` joined by at least one edge the value
/// lists `i`, `j` and the sorted attributed degrees of the vertices of cell
/// `i` into cell `j`. Each attributed degree is encoded as its length
/// followed by its `(attribute, count)` pairs.
pub struct QuotientInvariant;

pub fn quotient_summary(g: &crate::AttributedGraph, pi: &crate::OrderedPartition) -> InvariantValue {
    let starts: Vec<usize> = pi.cell_starts().collect();
    let mut index_of_start = vec![0usize; pi.n()];
    for (i, &st) in starts.iter().enumerate() {
        index_of_start[st] = i;
    }
    let cell_index = |v: usize| index_of_start[pi.cell_start(v)];
    // (i, j) -> list of attributed degrees of each vertex of i into j
    let mut pairs: BTreeMap<(usize, usize), Vec<Vec<(u64, u64)>>> = BTreeMap::new();
    let mut toward: BTreeMap<(usize, u64), u64> = BTreeMap::new();
    for (i, &st) in starts.iter().enumerate() {
        let size = pi.cell_len(st);
        let mut per_target: BTreeMap<usize, Vec<Vec<(u64, u64)>>> = BTreeMap::new();
        for v in pi.cell(st) {
            toward.clear();
            for &(u, a) in g.neighbors(v) {
                let j = cell_index(u);
                if j >= i {
                    *toward.entry((j, a)).or_insert(0) += 1;
                }
            }
            let mut by_target: BTreeMap<usize, Vec<(u64, u64)>> = BTreeMap::new();
            for (&(j, a), &c) in &toward {
                by_target.entry(j).or_default().push((a, c));
            }
            for (j, deg) in by_target {
                per_target.entry(j).or_default().push(deg);
            }
        }
        for (j, mut degs) in per_target {
            degs.resize(size, Vec::new());
            degs.sort();
            pairs.insert((i, j), degs);
        }
    }
    let mut out = Vec::new();
    for ((i, j), degs) in pairs {
        out.push(i as u64 + 1);
        out.push(j as u64 + 1);
        for d in degs {
            out.push(d.len() as u64);
            for (a, c) in d {
                out.push(a);
                out.push(c);
            }
        }
    }
    out
}

impl Visitor for QuotientInvariant {
    fn name(&self) -> &str {
        "invariant-q"
    }

    fn emits_invariants(&self) -> bool {
        true
    }

    fn tree_node_create_end(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {
        if s.is_pruned(node) {
            return;
        }
        let value = quotient_summary(s.graph(), s.partition(node));
        s.emit_invariant(node, vid, value);
    }
}

/// Partial-leaf invariant: whenever a singleton cell appears, its position
/// followed by the positions and edge attributes of its neighbors that are
/// already singletons.
pub struct PartialLeafInvariant;

#[derive(Default)]
struct PartialLeafState {
    seen: Vec<bool>,
}

fn partial_leaf_value(s: &Search<'_>, node: NodeId, pos: usize, seen: &[bool]) -> InvariantValue {
    let pi = s.partition(node);
    let v = pi.vertex_at(pos);
    let mut adj: Vec<(u64, u64)> = s
        .graph()
        .neighbors(v)
        .iter()
        .filter_map(|&(u, a)| {
            let q = pi.position(u);
            (seen[q] && q != pos).then_some((q as u64 + 1, a))
        })
        .collect();
    adj.sort_unstable();
    let mut out = Vec::with_capacity(1 + 2 * adj.len());
    out.push(pos as u64 + 1);
    for (q, a) in adj {
        out.push(q);
        out.push(a);
    }
    out
}

impl PartialLeafInvariant {
    fn visit_singleton(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId, pos: usize) {
        if s.partition(node).cell_len(s.partition(node).cell_start_at(pos)) != 1 {
            return;
        }
        if s.tree_data::<PartialLeafState>(vid).seen[pos] {
            return;
        }
        s.tree_data::<PartialLeafState>(vid).seen[pos] = true;
        let seen = std::mem::take(&mut s.tree_data::<PartialLeafState>(vid).seen);
        let value = partial_leaf_value(s, node, pos, &seen);
        s.tree_data::<PartialLeafState>(vid).seen = seen;
        s.emit_invariant(node, vid, value);
    }
}

impl Visitor for PartialLeafInvariant {
    fn name(&self) -> &str {
        "invariant-pl"
    }

    fn emits_invariants(&self) -> bool {
        true
    }

    fn new_tree_data(&self, g: &crate::AttributedGraph) -> Box<dyn std::any::Any> {
        Box::new(PartialLeafState { seen: vec![false; g.n()] })
    }

    fn tree_node_create_begin(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {
        let n = s.n();
        let mut seen = vec![false; n];
        if let Some(p) = s.node(node).parent() {
            let pp = s.partition(p);
            for st in pp.cell_starts().filter(|&st| pp.cell_len(st) == 1) {
                seen[st] = true;
            }
        }
        s.tree_data::<PartialLeafState>(vid).seen = seen;
        let pi = s.partition(node);
        let fresh: Vec<usize> = pi
            .cell_starts()
            .filter(|&st| pi.cell_len(st) == 1)
            .collect();
        for pos in fresh {
            if s.is_pruned(node) {
                return;
            }
            self.visit_singleton(s, vid, node, pos);
        }
    }

    fn new_cell(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId, pos: usize) {
        for p in [pos.checked_sub(1), Some(pos)].into_iter().flatten() {
            if s.is_pruned(node) {
                return;
            }
            self.visit_singleton(s, vid, node, p);
        }
    }
}
