//! A deliberately broken visitor for checking that the repetition protocol
//! catches labeling-dependent results.

use graphcanon::{NodeId, Search, Visitor, VisitorId};

/// Keeps only the root child of the smallest input label, which makes the
/// result depend on how the input happens to be numbered.
pub struct LabelBiasedPruner;

impl Visitor for LabelBiasedPruner {
    fn name(&self) -> &str {
        "label-biased-pruner"
    }

    fn before_descend(&self, s: &mut Search<'_>, _vid: VisitorId, node: NodeId) {
        if s.node(node).depth() != 0 || s.node(node).is_leaf() {
            return;
        }
        let target = s.node(node).target_cell().to_vec();
        let Some(&keep) = target.iter().min() else { return };
        for w in target {
            if w != keep && s.node(node).child(w).is_none() {
                s.set_child_pruned(node, w);
            }
        }
    }
}
