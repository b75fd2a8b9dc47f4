use std::rc::Rc;

use graphcanon::gen::worked_example;
use graphcanon::stats::{SearchTreeLog, StatsVisitor};
use graphcanon::{canonicalize, CellSelector, InvariantSet, RunConfig, TraversalKind};

fn run(config: &RunConfig) -> (graphcanon::RunReport, Vec<String>) {
    let g = worked_example();
    let suite = config.suite_with(vec![Rc::new(StatsVisitor)]).unwrap();
    let report = canonicalize(&g, &suite).unwrap();
    let log = report.visitor_data::<SearchTreeLog>().unwrap();
    let lines = log
        .nodes
        .iter()
        .map(|r| format!("{:?} {} {:?}", r.sequence, r.partition, r.status))
        .collect();
    (report, lines)
}

fn partition_of(log: &SearchTreeLog, seq: &[usize]) -> String {
    log.by_sequence(seq)[0].partition.clone()
}

#[test]
fn golden_partitions_without_pruning() {
    let config = RunConfig::new(TraversalKind::Dfs, CellSelector::First, InvariantSet::NONE).without_pruning();
    let (report, _) = run(&config);
    let log = report.visitor_data::<SearchTreeLog>().unwrap();
    assert_eq!(partition_of(log, &[]), "[1 2 | 7 8 9 10 | 3 4 5 6]");
    assert_eq!(partition_of(log, &[1]), "[1 | 2 | 7 8 9 10 | 5 6 | 3 4]");
    assert_eq!(partition_of(log, &[2]), "[2 | 1 | 7 8 9 10 | 3 4 | 5 6]");
    assert_eq!(partition_of(log, &[1, 7]), "[1 | 2 | 7 | 10 | 8 | 9 | 6 | 5 | 4 | 3]");
    assert_eq!(partition_of(log, &[1, 8]), "[1 | 2 | 8 | 9 | 7 | 10 | 5 | 6 | 3 | 4]");
    assert_eq!(partition_of(log, &[1, 9]), "[1 | 2 | 9 | 8 | 10 | 7 | 6 | 5 | 3 | 4]");
    assert_eq!(partition_of(log, &[2, 7]), "[2 | 1 | 7 | 10 | 8 | 9 | 4 | 3 | 6 | 5]");
    assert_eq!(log.explored_leaves().len(), 8);
    assert_eq!(report.leaked_nodes, 0);
}

#[test]
fn aut_pruning_matches_the_figure() {
    let mut config = RunConfig::new(TraversalKind::Dfs, CellSelector::First, InvariantSet::NONE);
    config.implicit_size2 = false;
    config.degree1 = false;
    let (report, lines) = run(&config);
    let log = report.visitor_data::<SearchTreeLog>().unwrap();
    let leaves: Vec<Vec<usize>> = log.explored_leaves().iter().map(|r| r.sequence.clone()).collect();
    assert!(leaves.len() <= 4, "{lines:#?}");
    assert_eq!(leaves, vec![vec![1, 7], vec![1, 8], vec![1, 9], vec![2, 7]], "{lines:#?}");
    let g = worked_example();
    for gamma in &report.generators {
        assert!(g.is_automorphism(gamma));
    }
}
