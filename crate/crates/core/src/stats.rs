//! Instrumentation visitors: a search-tree log with DOT rendering and an
//! allocation trace.

use std::any::Any;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::perm::Permutation;
use crate::search::{NodeId, Search};
use crate::visitor::{Visitor, VisitorId};

/// Final classification of a tree node, used for coloring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    Explored,
    /// Pruned while being created, e.g. by a node invariant.
    PrunedAtCreation,
    /// Flagged by subtree pruning after creation.
    Pruned,
    /// A leaf that compared greater than the best leaf at the time.
    WorseLeaf,
    /// A leaf that was the best leaf for a while.
    FormerBest,
    Canonical,
}

impl NodeStatus {
    pub fn color(self) -> &'static str {
        match self {
            NodeStatus::Explored => "white",
            NodeStatus::PrunedAtCreation => "red",
            NodeStatus::Pruned => "purple",
            NodeStatus::WorseLeaf => "brown",
            NodeStatus::FormerBest => "lightgreen",
            NodeStatus::Canonical => "darkgreen",
        }
    }
}

#[derive(Clone, Debug)]
pub struct NodeRecord {
    pub serial: u64,
    pub parent: Option<u64>,
    pub individualized: Option<usize>,
    pub depth: usize,
    /// Individualization sequence, 1-based.
    pub sequence: Vec<usize>,
    /// Partition after refinement.
    pub partition: String,
    pub leaf: bool,
    pub status: NodeStatus,
}

#[derive(Clone, Debug)]
pub struct AutRecord {
    pub gamma: Permutation,
    /// Leaf serials for explicit automorphisms: (canonical leaf, new leaf).
    pub leaves: Option<(u64, u64)>,
    /// Node serial and producer tag for implicit automorphisms.
    pub implicit: Option<(Option<u64>, String)>,
}

/// Everything the [`StatsVisitor`] records during a run.
#[derive(Clone, Debug, Default)]
pub struct SearchTreeLog {
    pub nodes: Vec<NodeRecord>,
    pub automorphisms: Vec<AutRecord>,
    pub leaves_added: u64,
    pub counters: BTreeMap<String, u64>,
    index: HashMap<u64, usize>,
}

impl SearchTreeLog {
    pub fn node(&self, serial: u64) -> Option<&NodeRecord> {
        self.index.get(&serial).map(|&i| &self.nodes[i])
    }

    /// Records of nodes with the given 1-based individualization sequence.
    pub fn by_sequence(&self, seq: &[usize]) -> Vec<&NodeRecord> {
        self.nodes.iter().filter(|r| r.sequence == seq).collect()
    }

    /// Leaves that were created and not pruned during creation.
    pub fn explored_leaves(&self) -> Vec<&NodeRecord> {
        self.nodes
            .iter()
            .filter(|r| r.leaf && r.status != NodeStatus::PrunedAtCreation)
            .collect()
    }

    fn status_mut(&mut self, serial: u64) -> Option<&mut NodeStatus> {
        let i = *self.index.get(&serial)?;
        Some(&mut self.nodes[i].status)
    }

    /// Graphviz rendering of the search tree.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("digraph search_tree {\n");
        out.push_str("  // legend: white = explored, red = pruned during creation, purple = pruned later,\n");
        out.push_str("  // brown = worse leaf, lightgreen = former best leaf, darkgreen = canonical leaf,\n");
        out.push_str("  // gray = automorphism\n");
        out.push_str("  node [shape=box, style=filled, fontname=\"monospace\"];\n");
        out.push_str("  subgraph cluster_legend {\n    label=\"legend\";\n");
        for (name, st) in [
            ("explored", NodeStatus::Explored),
            ("pruned during creation", NodeStatus::PrunedAtCreation),
            ("pruned later", NodeStatus::Pruned),
            ("worse leaf", NodeStatus::WorseLeaf),
            ("former best leaf", NodeStatus::FormerBest),
            ("canonical leaf", NodeStatus::Canonical),
        ] {
            let _ = writeln!(
                out,
                "    legend_{} [label=\"{}\", fillcolor={}];",
                st.color(),
                name,
                st.color()
            );
        }
        out.push_str("    legend_aut [label=\"automorphism\", fillcolor=gray, shape=ellipse];\n  }\n");
        for r in &self.nodes {
            let font = if matches!(r.status, NodeStatus::Canonical | NodeStatus::Pruned) {
                ", fontcolor=white"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "  n{} [label=\"{}: {}\", fillcolor={}{}];",
                r.serial,
                r.serial,
                r.partition,
                r.status.color(),
                font
            );
            if let (Some(p), Some(v)) = (r.parent, r.individualized) {
                let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", p, r.serial, v + 1);
            }
        }
        for (i, a) in self.automorphisms.iter().enumerate() {
            let _ = writeln!(
                out,
                "  a{} [label=\"{}\", shape=ellipse, fillcolor=gray];",
                i, a.gamma
            );
            if let Some((c, l)) = a.leaves {
                let _ = writeln!(out, "  n{} -> a{} [style=dashed];", c, i);
                let _ = writeln!(out, "  a{} -> n{} [style=dashed];", i, l);
            } else if let Some((Some(node), _)) = &a.implicit {
                let _ = writeln!(out, "  n{} -> a{} [style=dotted];", node, i);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Records every node, its fate, and every automorphism.
#[derive(Default)]
pub struct StatsVisitor;

impl StatsVisitor {
    fn log<'a>(s: &'a mut Search<'_>, vid: VisitorId) -> &'a mut SearchTreeLog {
        s.tree_data::<SearchTreeLog>(vid)
    }

    fn bump(s: &mut Search<'_>, vid: VisitorId, key: &str) {
        *Self::log(s, vid).counters.entry(key.to_string()).or_insert(0) += 1;
    }
}

impl Visitor for StatsVisitor {
    fn name(&self) -> &str {
        "stats"
    }

    fn new_tree_data(&self, _g: &crate::AttributedGraph) -> Box<dyn Any> {
        Box::new(SearchTreeLog::default())
    }

    fn tree_node_create_begin(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {
        let tn = s.node(node);
        let parent = tn.parent().map(|p| s.node(p).serial());
        let record = NodeRecord {
            serial: tn.serial(),
            parent,
            individualized: tn.individualized_vertex(),
            depth: tn.depth(),
            sequence: s.individualization_sequence(node).iter().map(|v| v + 1).collect(),
            partition: String::new(),
            leaf: false,
            status: NodeStatus::Explored,
        };
        let log = Self::log(s, vid);
        log.index.insert(record.serial, log.nodes.len());
        log.nodes.push(record);
    }

    fn tree_node_create_end(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {
        let serial = s.node(node).serial();
        let text = s.partition(node).to_string();
        let leaf = s.partition(node).is_discrete();
        let pruned = s.is_pruned(node);
        let log = Self::log(s, vid);
        let i = log.index[&serial];
        log.nodes[i].partition = text;
        log.nodes[i].leaf = leaf;
        if pruned {
            log.nodes[i].status = NodeStatus::PrunedAtCreation;
        }
        Self::bump(s, vid, "stats_nodes");
    }

    fn subtree_pruned(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {
        let serial = s.node(node).serial();
        if let Some(st) = Self::log(s, vid).status_mut(serial) {
            if *st == NodeStatus::Explored || *st == NodeStatus::Canonical {
                *st = NodeStatus::Pruned;
            }
        }
        Self::bump(s, vid, "stats_subtrees_pruned");
    }

    fn leaf_discarded(&self, s: &mut Search<'_>, vid: VisitorId, leaf: NodeId) {
        let serial = s.node(leaf).serial();
        if let Some(st) = Self::log(s, vid).status_mut(serial) {
            *st = NodeStatus::WorseLeaf;
        }
        Self::log(s, vid).leaves_added += 1;
    }

    fn canon_leaf_changed(&self, s: &mut Search<'_>, vid: VisitorId, new: Option<NodeId>, old: Option<NodeId>) {
        let new_serial = new.map(|n| s.node(n).serial());
        let old_serial = old.map(|n| s.node(n).serial());
        let log = Self::log(s, vid);
        if let Some(o) = old_serial {
            if let Some(st) = log.status_mut(o) {
                if *st == NodeStatus::Canonical {
                    *st = NodeStatus::FormerBest;
                }
            }
        }
        if let Some(nw) = new_serial {
            if let Some(st) = log.status_mut(nw) {
                *st = NodeStatus::Canonical;
            }
            log.leaves_added += 1;
        }
    }

    fn isomorphic_leaf(&self, s: &mut Search<'_>, vid: VisitorId, leaf: NodeId, gamma: &Permutation) {
        let leaf_serial = s.node(leaf).serial();
        let canon = s.canon_leaf().map(|c| s.node(c).serial());
        let log = Self::log(s, vid);
        log.leaves_added += 1;
        log.automorphisms.push(AutRecord {
            gamma: gamma.clone(),
            leaves: canon.map(|c| (c, leaf_serial)),
            implicit: None,
        });
    }

    fn implicit_automorphism(
        &self,
        s: &mut Search<'_>,
        vid: VisitorId,
        node: Option<NodeId>,
        gamma: &Permutation,
        tag: &str,
    ) {
        let serial = node.map(|n| s.node(n).serial());
        Self::log(s, vid).automorphisms.push(AutRecord {
            gamma: gamma.clone(),
            leaves: None,
            implicit: Some((serial, tag.to_string())),
        });
    }

    fn refine_abort(&self, s: &mut Search<'_>, vid: VisitorId, _node: NodeId) {
        Self::bump(s, vid, "stats_refine_aborts");
    }

    fn report(&self, data: &dyn Any, out: &mut BTreeMap<String, u64>) {
        if let Some(log) = data.downcast_ref::<SearchTreeLog>() {
            for (k, v) in &log.counters {
                out.insert(k.clone(), *v);
            }
            out.insert("stats_leaves_added".into(), log.leaves_added);
            out.insert("stats_automorphisms".into(), log.automorphisms.len() as u64);
        }
    }
}

/// Rows of (nodes created so far, nodes currently allocated).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AllocTrace {
    pub rows: Vec<(u64, usize)>,
}

impl AllocTrace {
    /// Two whitespace-separated columns with a header comment.
    pub fn render(&self) -> String {
        let mut out = String::from("# created allocated\n");
        for (c, a) in &self.rows {
            let _ = writeln!(out, "{c} {a}");
        }
        out
    }

    pub fn max_allocated(&self) -> usize {
        self.rows.iter().map(|r| r.1).max().unwrap_or(0)
    }
}

/// Tracks node allocation over time.
#[derive(Default)]
pub struct DebugVisitor;

impl Visitor for DebugVisitor {
    fn name(&self) -> &str {
        "debug"
    }

    fn new_tree_data(&self, _g: &crate::AttributedGraph) -> Box<dyn Any> {
        Box::new(AllocTrace::default())
    }

    fn tree_node_create_begin(&self, s: &mut Search<'_>, vid: VisitorId, _node: NodeId) {
        let row = (s.nodes_created(), s.allocated_nodes());
        s.tree_data::<AllocTrace>(vid).rows.push(row);
    }
}
