//! Target-cell selectors.

use crate::graph::AttributedGraph;
use crate::partition::OrderedPartition;
use crate::search::{NodeId, Search};
use crate::visitor::{Visitor, VisitorId};

/// The three selection rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellSelector {
    /// First non-singleton cell.
    First,
    /// First cell of maximum size.
    FirstLargest,
    /// First cell of maximum size among those non-uniformly joined to the
    /// most other cells.
    FirstLargestMaxJoined,
}

impl CellSelector {
    pub const ALL: [CellSelector; 3] = [
        CellSelector::First,
        CellSelector::FirstLargest,
        CellSelector::FirstLargestMaxJoined,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            CellSelector::First => "f",
            CellSelector::FirstLargest => "fl",
            CellSelector::FirstLargestMaxJoined => "flm",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.short_name() == text.trim().to_ascii_lowercase())
    }

    /// Start position of the selected cell, or `None` for discrete input.
    pub fn select(self, g: &AttributedGraph, pi: &OrderedPartition) -> Option<usize> {
        let mut candidates = pi.cell_starts().filter(|&s| pi.cell_len(s) > 1).peekable();
        candidates.peek()?;
        match self {
            CellSelector::First => candidates.next(),
            CellSelector::FirstLargest => first_largest(pi, candidates),
            CellSelector::FirstLargestMaxJoined => {
                let max = pi.cell_starts().map(|s| pi.cell_len(s)).max()?;
                let largest: Vec<usize> = candidates.filter(|&s| pi.cell_len(s) == max).collect();
                if largest.len() == 1 {
                    return Some(largest[0]);
                }
                let mut best = largest[0];
                let mut best_count = None;
                for &u in &largest {
                    let c = non_uniform_join_count(g, pi, u);
                    if best_count.is_none_or(|b| c > b) {
                        best = u;
                        best_count = Some(c);
                    }
                }
                Some(best)
            }
        }
    }
}

fn first_largest(pi: &OrderedPartition, candidates: impl Iterator<Item = usize>) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for s in candidates {
        let len = pi.cell_len(s);
        if best.is_none_or(|(_, l)| len > l) {
            best = Some((s, len));
        }
    }
    best.map(|(s, _)| s)
}

/// `true` if every vertex of the cell at `u` has both a neighbor and a
/// non-neighbor in the cell at `w`. Edge attributes are ignored.
pub fn non_uniformly_joined(g: &AttributedGraph, pi: &OrderedPartition, u: usize, w: usize) -> bool {
    let w_len = pi.cell_len(w);
    pi.cell(u).all(|x| {
        let mut inside: Vec<usize> = g
            .neighbors(x)
            .iter()
            .map(|&(y, _)| y)
            .filter(|&y| pi.cell_start(y) == w)
            .collect();
        inside.dedup();
        !inside.is_empty() && inside.len() < w_len
    })
}

/// Number of cells `W != U` that the cell at `u` is non-uniformly joined to.
pub fn non_uniform_join_count(g: &AttributedGraph, pi: &OrderedPartition, u: usize) -> usize {
    // distinct neighbor count per target cell, for every vertex of U
    let mut per_vertex: Vec<std::collections::BTreeMap<usize, usize>> = Vec::new();
    for x in pi.cell(u) {
        let mut counts = std::collections::BTreeMap::new();
        let mut last = None;
        for &(y, _) in g.neighbors(x) {
            if last == Some(y) {
                continue;
            }
            last = Some(y);
            *counts.entry(pi.cell_start(y)).or_insert(0usize) += 1;
        }
        per_vertex.push(counts);
    }
    pi.cell_starts()
        .filter(|&w| w != u)
        .filter(|&w| {
            let w_len = pi.cell_len(w);
            per_vertex.iter().all(|c| c.get(&w).is_some_and(|&k| k < w_len))
        })
        .count()
}

/// Visitor wrapper around a [`CellSelector`].
pub struct TargetCellVisitor {
    selector: CellSelector,
}

impl TargetCellVisitor {
    pub fn new(selector: CellSelector) -> Self {
        TargetCellVisitor { selector }
    }
}

impl Visitor for TargetCellVisitor {
    fn name(&self) -> &str {
        match self.selector {
            CellSelector::First => "target-f",
            CellSelector::FirstLargest => "target-fl",
            CellSelector::FirstLargestMaxJoined => "target-flm",
        }
    }

    fn can_select_target_cell(&self) -> bool {
        true
    }

    fn select_target_cell(&self, s: &mut Search<'_>, _vid: VisitorId, node: NodeId) -> usize {
        self.selector
            .select(s.graph(), s.partition(node))
            .expect("called only on non-discrete partitions")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_and_fl_on_example_partition() {
        let g = AttributedGraph::from_edges(5, &[]).unwrap();
        let pi = OrderedPartition::parse("[1 | 2 3 | 4 5]").unwrap();
        assert_eq!(CellSelector::First.select(&g, &pi), Some(1));
        assert_eq!(CellSelector::FirstLargest.select(&g, &pi), Some(1));
        let pi = OrderedPartition::parse("[1 | 2 3 | 4 5 6 7]").unwrap();
        let g = AttributedGraph::from_edges(7, &[]).unwrap();
        assert_eq!(CellSelector::First.select(&g, &pi), Some(1));
        assert_eq!(CellSelector::FirstLargest.select(&g, &pi), Some(3));
    }

    #[test]
    fn discrete_has_no_target() {
        let g = AttributedGraph::from_edges(2, &[]).unwrap();
        let pi = OrderedPartition::parse("[1 | 2]").unwrap();
        for sel in CellSelector::ALL {
            assert_eq!(sel.select(&g, &pi), None);
        }
    }

    #[test]
    fn flm_prefers_joined_cell() {
        // cells A = {1,2}, B = {3,4}, C = {5,6}; A is joined to C by a
        // perfect matching (non-uniform), B has no edges
        let g = AttributedGraph::from_edges_1based(6, &[(1, 5), (2, 6)]).unwrap();
        let pi = OrderedPartition::parse("[3 4 | 1 2 | 5 6]").unwrap();
        assert_eq!(CellSelector::FirstLargest.select(&g, &pi), Some(0));
        assert_eq!(CellSelector::FirstLargestMaxJoined.select(&g, &pi), Some(2));
        assert_eq!(non_uniform_join_count(&g, &pi, 2), 1);
        assert_eq!(non_uniform_join_count(&g, &pi, 0), 0);
        assert!(non_uniformly_joined(&g, &pi, 2, 4));
        assert!(!non_uniformly_joined(&g, &pi, 0, 4));
    }

    #[test]
    fn flm_equals_fl_without_joins() {
        let g = AttributedGraph::from_edges_1based(6, &[(1, 2), (3, 4), (5, 6)]).unwrap();
        let pi = OrderedPartition::parse("[1 2 | 3 4 | 5 6]").unwrap();
        assert_eq!(
            CellSelector::FirstLargestMaxJoined.select(&g, &pi),
            CellSelector::FirstLargest.select(&g, &pi)
        );
    }
}
