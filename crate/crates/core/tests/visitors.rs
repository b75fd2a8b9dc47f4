use std::any::Any;
use std::rc::Rc;

use graphcanon::gen::{complete, cycle, star, worked_example};
use graphcanon::invariants::quotient_summary;
use graphcanon::oracle::{brute_aut, orbit_classes};
use graphcanon::refine::refine_equitable;
use graphcanon::stats::{NodeStatus, SearchTreeLog, StatsVisitor};
use graphcanon::{
    canonicalize, AttributedGraph, CanonError, CellSelector, InvariantSet, NodeId, OrderedPartition, RunConfig,
    Search, TraversalKind, Visitor, VisitorId,
};

/// Records the invariant trace of every node as it is finished.
struct TraceRecorder;

#[derive(Default)]
struct Traces(Vec<(Vec<usize>, Vec<Vec<u64>>)>);

impl Visitor for TraceRecorder {
    fn name(&self) -> &str {
        "trace-recorder"
    }

    fn new_tree_data(&self, _g: &AttributedGraph) -> Box<dyn Any> {
        Box::new(Traces::default())
    }

    fn tree_node_create_end(&self, s: &mut Search<'_>, vid: VisitorId, node: NodeId) {
        let seq: Vec<usize> = s.individualization_sequence(node).iter().map(|v| v + 1).collect();
        let values = s.node(node).trace().iter().map(|(_, v)| v.clone()).collect();
        s.tree_data::<Traces>(vid).0.push((seq, values));
    }
}

fn traces(config: &RunConfig, g: &AttributedGraph) -> Vec<(Vec<usize>, Vec<Vec<u64>>)> {
    let report = canonicalize(g, &config.suite_with(vec![Rc::new(TraceRecorder)]).unwrap()).unwrap();
    report.visitor_data::<Traces>().unwrap().0.clone()
}

fn only(inv: InvariantSet) -> RunConfig {
    RunConfig::new(TraversalKind::Dfs, CellSelector::First, inv).without_pruning()
}

#[test]
fn trace_invariant_emits_new_cell_positions_at_the_root() {
    let inv = InvariantSet {
        trace: true,
        ..InvariantSet::NONE
    };
    let all = traces(&only(inv), &worked_example());
    let root = &all.iter().find(|(seq, _)| seq.is_empty()).unwrap().1;
    assert_eq!(root, &vec![vec![3], vec![7]]);
    let child = &all.iter().find(|(seq, _)| seq == &[1]).unwrap().1;
    assert!(!child.is_empty());
    assert!(child.iter().all(|v| v.len() == 1 && (2..=10).contains(&v[0])));
}

#[test]
fn quotient_invariant_is_one_summary_per_node() {
    let inv = InvariantSet {
        quotient: true,
        ..InvariantSet::NONE
    };
    let g = worked_example();
    let all = traces(&only(inv), &g);
    let root = &all.iter().find(|(seq, _)| seq.is_empty()).unwrap().1;
    let mut pi = OrderedPartition::initial(&g).unwrap();
    refine_equitable(&g, &mut pi);
    assert_eq!(root, &vec![quotient_summary(&g, &pi)]);
    let q = quotient_summary(&g, &pi);
    assert_eq!(&q[..2], &[1, 3]);
}

#[test]
fn quotient_summary_of_the_unit_partition_only_sees_degrees() {
    let a = cycle(6);
    let b = graphcanon::gen::disjoint_union(&cycle(3), &cycle(3));
    let pa = OrderedPartition::unit(6).unwrap();
    assert_eq!(quotient_summary(&a, &pa), quotient_summary(&b, &pa));
}

#[test]
fn partial_leaf_invariant_reports_new_singletons() {
    let inv = InvariantSet {
        partial_leaf: true,
        ..InvariantSet::NONE
    };
    let all = traces(&only(inv), &worked_example());
    let root = &all.iter().find(|(seq, _)| seq.is_empty()).unwrap().1;
    assert!(root.is_empty(), "no singletons at the root: {root:?}");
    let child = &all.iter().find(|(seq, _)| seq == &[1]).unwrap().1;
    assert_eq!(child.len(), 2);
    assert_eq!(child[0][0], 1);
    assert_eq!(child[1][0], 2);
}

#[test]
fn invariants_never_change_the_automorphism_orbits() {
    let g = worked_example();
    for inv in InvariantSet::subsets() {
        let report = RunConfig::new(TraversalKind::Dfs, CellSelector::First, inv).canonicalize(&g).unwrap();
        let orbits = orbit_classes(10, &report.generators);
        assert_eq!(orbits, vec![vec![0], vec![1], vec![2, 3], vec![4, 5], vec![6, 7, 8, 9]], "{inv}");
    }
}

fn with_only(size2: bool, degree1: bool) -> RunConfig {
    let mut c = RunConfig::new(TraversalKind::Dfs, CellSelector::FirstLargest, InvariantSet::NONE);
    c.implicit_size2 = size2;
    c.degree1 = degree1;
    c
}

#[test]
fn size_two_cells_report_reflections_of_even_cycles() {
    for n in [6, 8, 12, 20] {
        let g = cycle(n);
        let report = with_only(true, false).canonicalize(&g).unwrap();
        assert!(report.stats["size2_automorphisms"] > 0, "C{n}");
        for gamma in &report.generators {
            assert!(g.is_automorphism(gamma));
        }
        let plain = with_only(false, false).canonicalize(&g).unwrap();
        assert!(report.nodes_created <= plain.nodes_created, "C{n}");
    }
}

#[test]
fn degree_one_twins_are_swapped_implicitly() {
    let g = star(3);
    let report = with_only(false, true).canonicalize(&g).unwrap();
    assert!(report.stats["degree1_automorphisms"] >= 2);
    assert_eq!(orbit_classes(4, &report.generators), orbit_classes(4, &brute_aut(&g).unwrap()));
    for gamma in &report.generators {
        assert!(g.is_automorphism(gamma));
    }
    // a perfect matching: every edge is an isolated pair
    let m = AttributedGraph::from_edges(6, &[(0, 1), (2, 3), (4, 5)]).unwrap();
    let report = with_only(false, true).canonicalize(&m).unwrap();
    assert_eq!(orbit_classes(6, &report.generators), vec![vec![0, 1, 2, 3, 4, 5]]);
}

#[test]
fn tight_memory_limit_is_a_resource_error() {
    let g = complete(6);
    let config = RunConfig::new(TraversalKind::BfsExpM, CellSelector::First, InvariantSet::NONE).with_memory_limit(10);
    assert!(matches!(config.canonicalize(&g), Err(CanonError::MemoryLimit { .. })));
    let g = cycle(30);
    let cost = graphcanon::traversal::node_cost_bytes(30, 4);
    let config = RunConfig::new(TraversalKind::BfsExpM, CellSelector::First, InvariantSet::NONE)
        .without_pruning()
        .with_memory_limit(2 * cost);
    assert!(matches!(config.canonicalize(&g), Err(CanonError::MemoryLimit { .. })));
}

#[test]
fn experimental_path_cap_keeps_results() {
    let g = graphcanon::gen::circulant(14, &[1, 4]);
    let mut one = RunConfig::new(TraversalKind::BfsExp, CellSelector::First, InvariantSet::ALL);
    one.paths_per_level = Some(1);
    let all = RunConfig::new(TraversalKind::BfsExp, CellSelector::First, InvariantSet::ALL);
    let a = one.canonicalize(&g).unwrap();
    let b = all.canonicalize(&g).unwrap();
    assert_eq!(a.canonical_form, b.canonical_form);
    assert!(b.stats["bfs_experimental_paths"] >= a.stats["bfs_experimental_paths"]);
}

#[test]
fn tree_log_marks_one_canonical_leaf() {
    let g = worked_example();
    let mut config = RunConfig::new(TraversalKind::Dfs, CellSelector::First, InvariantSet::NONE);
    config.implicit_size2 = false;
    config.degree1 = false;
    let report = canonicalize(&g, &config.suite_with(vec![Rc::new(StatsVisitor)]).unwrap()).unwrap();
    let log = report.visitor_data::<SearchTreeLog>().unwrap();
    let canonical: Vec<_> = log.nodes.iter().filter(|r| r.status == NodeStatus::Canonical).collect();
    assert_eq!(canonical.len(), 1);
    assert!(canonical[0].leaf);
    for seq in [[1, 10], [2, 8], [2, 9], [2, 10]] {
        assert!(
            log.by_sequence(&seq).iter().all(|r| r.status != NodeStatus::Explored),
            "{seq:?} should have been pruned"
        );
    }
    assert_eq!(log.automorphisms.len(), report.generators.len());
    let dot = log.to_dot();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("fillcolor=darkgreen").count(), 2);
}

#[test]
fn dfs_keeps_only_one_path_allocated() {
    let g = cycle(40);
    let report = with_only(false, false).canonicalize(&g).unwrap();
    assert!(report.max_allocated <= 5, "{}", report.max_allocated);
    assert_eq!(report.leaked_nodes, 0);
}
