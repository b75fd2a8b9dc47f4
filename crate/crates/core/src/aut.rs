//! Automorphism pruning and the two implicit-automorphism producers.
//!
//! [`AutPruner`] consumes automorphisms, explicit ones from isomorphic
//! leaves and implicit ones reported by other visitors, and prunes
//! children that lie in the same orbit of the pointwise stabilizer of the
//! node's individualization sequence. [`ImplicitSize2`] and [`Degree1`]
//! produce implicit automorphisms without visiting leaves.

use std::any::Any;
use std::collections::{BTreeMap, HashSet};

use crate::perm::{OrbitPartition, Permutation};
use crate::search::{NodeId, Search};
use crate::visitor::{RefineStatus, Visitor, VisitorId};

struct PrunerNode {
    k: usize,
    stab: Vec<usize>,
    orbits: Option<OrbitPartition>,
}

#[derive(Default)]
struct PrunerStats {
    children_pruned: u64,
    subtrees_pruned_by_leaf: u64,
}

/// Prunes children using the automorphisms found so far.
#[derive(Default)]
pub struct AutPruner;

impl AutPruner {
    fn update(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {
        // collect the path, then update parent-first
        let mut path = vec![node];
        while let Some(p) = s.node(*path.last().unwrap()).parent() {
            path.push(p);
        }
        path.reverse();
        let total = s.automorphisms().generation();
        let mut parent_k = total;
        let mut parent_stab: Vec<usize> = Vec::new();
        for (i, &id) in path.iter().enumerate() {
            let k_p = if i == 0 { total } else { parent_k };
            let data = s.node_data_ref::<PrunerNode>(vid, id);
            if data.k == k_p {
                parent_k = data.k;
                parent_stab = data.stab.clone();
                continue;
            }
            let from = data.k;
            let fresh: Vec<usize> = if i == 0 {
                (from..k_p).collect()
            } else {
                let w = s.node(id).individualized_vertex().expect("non-root");
                parent_stab
                    .iter()
                    .copied()
                    .filter(|&g| g >= from && g < k_p && s.automorphisms().get(g).fixes(w))
                    .collect()
            };
            let n = s.n();
            let gens: Vec<Permutation> = fresh.iter().map(|&g| s.automorphisms().get(g).clone()).collect();
            let data = s.node_data::<PrunerNode>(vid, id);
            data.k = k_p;
            data.stab.extend_from_slice(&fresh);
            if !gens.is_empty() {
                let orbits = data.orbits.get_or_insert_with(|| OrbitPartition::new(n));
                for g in &gens {
                    orbits.union_permutation(g);
                }
            }
            parent_k = k_p;
            parent_stab = data.stab.clone();
            if !gens.is_empty() && !s.is_pruned(id) && !s.node(id).is_leaf() {
                self.prune_children(s, vid, id);
            }
        }
    }

    fn prune_children(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {
        let target = s.node(node).target_cell().to_vec();
        let canon_child = s.canon_leaf().and_then(|c| s.child_towards(node, c));
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        {
            let data = s.node_data::<PrunerNode>(vid, node);
            let orbits = data.orbits.as_mut().expect("orbits exist once generators were added");
            for &w in &target {
                classes.entry(orbits.orbit_min(w)).or_default().push(w);
            }
        }
        let mut pruned = 0;
        for members in classes.values().filter(|m| m.len() > 1) {
            let tn = s.node(node);
            let keeper = members
                .iter()
                .copied()
                .find(|&w| canon_child.is_some() && tn.child(w) == canon_child)
                .or_else(|| {
                    members.iter().copied().find(|&w| {
                        tn.child_explored(w) || tn.child(w).is_some_and(|c| !s.is_pruned(c))
                    })
                })
                .or_else(|| members.iter().copied().find(|&w| !tn.child_pruned(w)));
            let Some(keeper) = keeper else { continue };
            for &w in members {
                if w == keeper || s.node(node).child_pruned(w) {
                    continue;
                }
                let child = s.node(node).child(w);
                s.set_child_pruned(node, w);
                pruned += 1;
                if let Some(c) = child {
                    s.prune_tree(c);
                }
            }
        }
        s.tree_data::<PrunerStats>(vid).children_pruned += pruned;
    }
}

impl Visitor for AutPruner {
    fn name(&self) -> &str {
        "aut-pruner"
    }

    fn new_tree_data(&self, _g: &crate::AttributedGraph) -> Box<dyn Any> {
        Box::new(PrunerStats::default())
    }

    fn new_node_data(&self) -> Option<Box<dyn Any>> {
        Some(Box::new(PrunerNode {
            k: 0,
            stab: Vec::new(),
            orbits: None,
        }))
    }

    fn before_descend(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {
        self.update(s, vid, node);
    }

    fn isomorphic_leaf(&self, s: &mut Search<'_>, vid: VisitorId, leaf: NodeId, _gamma: &Permutation) {
        let Some(canon) = s.canon_leaf() else { return };
        // lowest common ancestor by walking up from the deeper node
        let (mut a, mut b) = (canon, leaf);
        while s.node(a).depth() > s.node(b).depth() {
            a = s.node(a).parent().expect("deeper node has a parent");
        }
        while s.node(b).depth() > s.node(a).depth() {
            b = s.node(b).parent().expect("deeper node has a parent");
        }
        while a != b {
            a = s.node(a).parent().expect("common root");
            b = s.node(b).parent().expect("common root");
        }
        if let Some(tp) = s.child_towards(a, leaf) {
            s.prune_tree(tp);
            s.tree_data::<PrunerStats>(vid).subtrees_pruned_by_leaf += 1;
        }
    }

    fn report(&self, data: &dyn Any, out: &mut BTreeMap<String, u64>) {
        if let Some(st) = data.downcast_ref::<PrunerStats>() {
            out.insert("aut_children_pruned".into(), st.children_pruned);
            out.insert("aut_subtrees_pruned".into(), st.subtrees_pruned_by_leaf);
        }
    }
}

struct Size2Tree {
    gamma: Permutation,
    reported: u64,
}

/// Reports the automorphisms implied by a partition whose cells all have
/// size one or two, and prunes one child of every such node.
#[derive(Default)]
pub struct ImplicitSize2;

fn fulfilled(s: &Search<'_>, vid: VisitorId, node: NodeId) -> bool {
    *s.node_data_ref::<bool>(vid, node)
}

impl Visitor for ImplicitSize2 {
    fn name(&self) -> &str {
        "implicit-size2"
    }

    fn new_tree_data(&self, g: &crate::AttributedGraph) -> Box<dyn Any> {
        Box::new(Size2Tree {
            gamma: Permutation::identity(g.n()),
            reported: 0,
        })
    }

    fn new_node_data(&self) -> Option<Box<dyn Any>> {
        Some(Box::new(false))
    }

    fn tree_node_create_begin(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {
        let Some(parent) = s.node(node).parent() else { return };
        if !fulfilled(s, vid, parent) {
            return;
        }
        *s.node_data::<bool>(vid, node) = true;
        let u = s.node(node).individualized_vertex().expect("child node");
        let pi = s.partition(node);
        let v = pi.vertex_at(pi.position(u) + 1);
        s.tree_data::<Size2Tree>(vid).gamma.then_swap(u, v);
    }

    fn new_cell(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId, pos: usize) {
        if !fulfilled(s, vid, node) {
            return;
        }
        let pi = s.partition(node);
        let (u, v) = (pi.vertex_at(pos - 1), pi.vertex_at(pos));
        s.tree_data::<Size2Tree>(vid).gamma.then_swap(u, v);
    }

    fn tree_node_create_end(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {
        let n = s.n();
        if s.is_pruned(node) {
            if fulfilled(s, vid, node) {
                s.tree_data::<Size2Tree>(vid).gamma = Permutation::identity(n);
            }
            return;
        }
        if fulfilled(s, vid, node) {
            let gamma = std::mem::replace(&mut s.tree_data::<Size2Tree>(vid).gamma, Permutation::identity(n));
            if !gamma.is_identity() {
                s.tree_data::<Size2Tree>(vid).reported += 1;
            }
            s.report_implicit_automorphism(Some(node), gamma, "size2");
        } else if !s.partition(node).is_discrete() {
            let pi = s.partition(node);
            if pi.cell_starts().all(|st| pi.cell_len(st) <= 2) {
                *s.node_data::<bool>(vid, node) = true;
            }
        }
        if fulfilled(s, vid, node) && !s.partition(node).is_discrete() && !s.is_pruned(node) {
            let target = s.node(node).target_cell().to_vec();
            debug_assert_eq!(target.len(), 2);
            let (u, v) = (target[0], target[1]);
            if !s.node(node).child_pruned(u) && !s.node(node).child_pruned(v) {
                s.set_child_pruned(node, v);
            }
        }
    }

    fn report(&self, data: &dyn Any, out: &mut BTreeMap<String, u64>) {
        if let Some(st) = data.downcast_ref::<Size2Tree>() {
            out.insert("size2_automorphisms".into(), st.reported);
        }
    }
}

struct Degree1Tree {
    has_pendants: bool,
    seen: HashSet<Vec<usize>>,
    reported: u64,
    splits: u64,
}

/// Refines and reports automorphisms on cells made of degree-1 vertices.
///
/// For a cell whose vertices all have degree one:
/// * vertices sharing their neighbor are twins; swapping consecutive twins
///   is reported;
/// * vertices paired with each other inside the cell form isolated edges;
///   the swap inside a pair and the swap of consecutive pairs are reported;
/// * vertices whose neighbors are distinct singletons are split into
///   singletons ordered by the neighbor's position.
#[derive(Default)]
pub struct Degree1;

impl Degree1 {
    fn report(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId, gamma: Permutation) {
        let st = s.tree_data::<Degree1Tree>(vid);
        if gamma.is_identity() || !st.seen.insert(gamma.images().to_vec()) {
            return;
        }
        st.reported += 1;
        s.report_implicit_automorphism(Some(node), gamma, "degree1");
    }
}

impl Visitor for Degree1 {
    fn name(&self) -> &str {
        "degree1"
    }

    fn new_tree_data(&self, g: &crate::AttributedGraph) -> Box<dyn Any> {
        Box::new(Degree1Tree {
            has_pendants: (0..g.n()).any(|v| g.degree(v) == 1),
            seen: HashSet::new(),
            reported: 0,
            splits: 0,
        })
    }

    fn refine(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) -> RefineStatus {
        if !s.tree_data::<Degree1Tree>(vid).has_pendants {
            return RefineStatus::Unchanged;
        }
        let g = s.graph();
        let n = g.n();
        let cells: Vec<(usize, Vec<usize>)> = {
            let pi = s.partition(node);
            pi.cell_starts()
                .filter(|&st| pi.cell_len(st) > 1)
                .map(|st| (st, pi.cell(st).collect::<Vec<_>>()))
                .filter(|(_, c)| c.iter().all(|&v| g.degree(v) == 1))
                .collect()
        };
        let mut status = RefineStatus::Unchanged;
        for (start, cell) in cells {
            let nbr = |v: usize| g.neighbors(v)[0].0;
            let pi = s.partition(node);
            let in_cell = |u: usize| pi.cell_start(u) == start;
            if cell.iter().all(|&v| in_cell(nbr(v))) {
                // isolated edges
                let mut pairs: Vec<(usize, usize)> = cell
                    .iter()
                    .copied()
                    .filter(|&v| v < nbr(v))
                    .map(|v| (v, nbr(v)))
                    .collect();
                pairs.sort_unstable();
                let mut gammas = Vec::new();
                for &(a, b) in &pairs {
                    gammas.push(Permutation::transposition(n, a, b));
                }
                for w in pairs.windows(2) {
                    let (a, b) = w[0];
                    let (c, d) = w[1];
                    if g.neighbors(a)[0].1 != g.neighbors(c)[0].1 {
                        continue;
                    }
                    let mut gamma = Permutation::transposition(n, a, c);
                    gamma.then_swap(b, d);
                    gammas.push(gamma);
                }
                for gamma in gammas {
                    self.report(s, vid, node, gamma);
                }
                continue;
            }
            let mut groups: BTreeMap<(usize, u64), Vec<usize>> = BTreeMap::new();
            for &v in &cell {
                groups.entry(g.neighbors(v)[0]).or_default().push(v);
            }
            let singleton_nbrs = groups.len() == cell.len()
                && groups.keys().all(|&(u, _)| pi.cell_len(pi.cell_start(u)) == 1);
            if singleton_nbrs {
                let mut order = cell.clone();
                order.sort_by_key(|&v| pi.position(nbr(v)));
                let cuts: Vec<usize> = (start + 1..start + cell.len()).collect();
                let pi = s.partition_mut(node);
                pi.reorder_cell(start, &order);
                pi.cut(start, &cuts);
                s.tree_data::<Degree1Tree>(vid).splits += 1;
                status = RefineStatus::Changed;
                for pos in cuts {
                    if !s.new_cell(node, pos) {
                        return RefineStatus::Aborted;
                    }
                }
                continue;
            }
            let mut gammas = Vec::new();
            for twins in groups.values() {
                let mut twins = twins.clone();
                twins.sort_unstable();
                for w in twins.windows(2) {
                    gammas.push(Permutation::transposition(n, w[0], w[1]));
                }
            }
            for gamma in gammas {
                self.report(s, vid, node, gamma);
            }
        }
        status
    }

    fn report(&self, data: &dyn Any, out: &mut BTreeMap<String, u64>) {
        if let Some(st) = data.downcast_ref::<Degree1Tree>() {
            out.insert("degree1_automorphisms".into(), st.reported);
            out.insert("degree1_splits".into(), st.splits);
        }
    }
}
