//! Configurations, suite assembly, and repeated runs on relabeled inputs.

use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::aut::{AutPruner, Degree1, ImplicitSize2};
use crate::error::CanonError;
use crate::graph::AttributedGraph;
use crate::invariants::{PartialLeafInvariant, QuotientInvariant, TraceInvariant};
use crate::perm::Permutation;
use crate::refine::WlRefiner;
use crate::search::{canonicalize, RunReport};
use crate::target_cell::{CellSelector, TargetCellVisitor};
use crate::traversal::{BreadthFirst, DepthFirst, DEFAULT_INT_WIDTH};
use crate::visitor::{Visitor, VisitorSuite};

/// Two mebibytes, the default limit of the memory-bounded traversal.
pub const DEFAULT_MEMORY_LIMIT: u64 = 2 * 1024 * 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TraversalKind {
    Dfs,
    BfsExp,
    BfsExpM,
}

impl TraversalKind {
    pub const ALL: [TraversalKind; 3] = [TraversalKind::Dfs, TraversalKind::BfsExp, TraversalKind::BfsExpM];

    pub fn short_name(self) -> &'static str {
        match self {
            TraversalKind::Dfs => "dfs",
            TraversalKind::BfsExp => "bfs-exp",
            TraversalKind::BfsExpM => "bfs-exp-m",
        }
    }
}

impl FromStr for TraversalKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|t| t.short_name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown traversal '{s}' (expected dfs, bfs-exp or bfs-exp-m)"))
    }
}

impl FromStr for CellSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CellSelector::parse(s).ok_or_else(|| format!("unknown target cell selector '{s}' (expected f, fl or flm)"))
    }
}

/// A subset of the three node invariants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct InvariantSet {
    pub trace: bool,
    pub quotient: bool,
    pub partial_leaf: bool,
}

impl InvariantSet {
    pub const NONE: InvariantSet = InvariantSet {
        trace: false,
        quotient: false,
        partial_leaf: false,
    };
    pub const ALL: InvariantSet = InvariantSet {
        trace: true,
        quotient: true,
        partial_leaf: true,
    };

    /// All eight subsets.
    pub fn subsets() -> impl Iterator<Item = InvariantSet> {
        (0..8u8).map(|m| InvariantSet {
            trace: m & 1 != 0,
            quotient: m & 2 != 0,
            partial_leaf: m & 4 != 0,
        })
    }

    pub fn is_empty(self) -> bool {
        self == Self::NONE
    }
}

impl fmt::Display for InvariantSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.partial_leaf {
            parts.push("pl");
        }
        if self.quotient {
            parts.push("q");
        }
        if self.trace {
            parts.push("t");
        }
        if parts.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for InvariantSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = InvariantSet::NONE;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.to_ascii_lowercase().as_str() {
                "t" => set.trace = true,
                "q" => set.quotient = true,
                "pl" => set.partial_leaf = true,
                "none" => {}
                other => return Err(format!("unknown invariant '{other}' (expected pl, q, t)")),
            }
        }
        Ok(set)
    }
}

/// Everything that selects a canonization function and its instrumentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub traversal: TraversalKind,
    pub selector: CellSelector,
    pub invariants: InvariantSet,
    pub aut_pruner: bool,
    pub implicit_size2: bool,
    pub degree1: bool,
    /// Byte limit for [`TraversalKind::BfsExpM`].
    pub memory_limit: u64,
    pub int_width: u64,
    /// Experimental paths per level for the breadth-first traversals;
    /// `None` starts one from every eligible frontier node.
    pub paths_per_level: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            traversal: TraversalKind::Dfs,
            selector: CellSelector::FirstLargestMaxJoined,
            invariants: InvariantSet::NONE,
            aut_pruner: true,
            implicit_size2: true,
            degree1: true,
            memory_limit: DEFAULT_MEMORY_LIMIT,
            int_width: DEFAULT_INT_WIDTH,
            paths_per_level: None,
        }
    }
}

impl RunConfig {
    pub fn new(traversal: TraversalKind, selector: CellSelector, invariants: InvariantSet) -> Self {
        RunConfig {
            traversal,
            selector,
            invariants,
            ..Default::default()
        }
    }

    /// Disables the automorphism pruner and both implicit producers.
    pub fn without_pruning(mut self) -> Self {
        self.aut_pruner = false;
        self.implicit_size2 = false;
        self.degree1 = false;
        self
    }

    pub fn with_memory_limit(mut self, bytes: u64) -> Self {
        self.memory_limit = bytes;
        self
    }

    /// The 72 combinations of traversal, selector and invariant subset,
    /// with default pruning.
    pub fn grid() -> Vec<RunConfig> {
        let mut out = Vec::new();
        for t in TraversalKind::ALL {
            for c in CellSelector::ALL {
                for inv in InvariantSet::subsets() {
                    out.push(RunConfig::new(t, c, inv));
                }
            }
        }
        out
    }

    pub fn label(&self) -> String {
        let mut s = format!("{}/{}/{}", self.traversal.short_name(), self.selector.short_name(), self.invariants);
        if !self.aut_pruner {
            s.push_str("/no-aut");
        }
        if !self.implicit_size2 {
            s.push_str("/no-size2");
        }
        if !self.degree1 {
            s.push_str("/no-degree1");
        }
        s
    }

    /// The visitors of this configuration in registration order.
    pub fn visitors(&self) -> Vec<Rc<dyn Visitor>> {
        let mut v: Vec<Rc<dyn Visitor>> = Vec::new();
        v.push(match self.traversal {
            TraversalKind::Dfs => Rc::new(DepthFirst),
            TraversalKind::BfsExp => Rc::new(BreadthFirst::new().paths_per_level(self.paths_per_level)),
            TraversalKind::BfsExpM => Rc::new(
                BreadthFirst::with_memory_limit(self.memory_limit)
                    .int_width(self.int_width)
                    .paths_per_level(self.paths_per_level),
            ),
        });
        v.push(Rc::new(TargetCellVisitor::new(self.selector)));
        v.push(Rc::new(WlRefiner::new()));
        if self.degree1 {
            v.push(Rc::new(Degree1));
        }
        if self.invariants.trace {
            v.push(Rc::new(TraceInvariant));
        }
        if self.invariants.quotient {
            v.push(Rc::new(QuotientInvariant));
        }
        if self.invariants.partial_leaf {
            v.push(Rc::new(PartialLeafInvariant));
        }
        if self.implicit_size2 {
            v.push(Rc::new(ImplicitSize2));
        }
        if self.aut_pruner {
            v.push(Rc::new(AutPruner));
        }
        v
    }

    pub fn suite(&self) -> Result<VisitorSuite, CanonError> {
        VisitorSuite::new(self.visitors())
    }

    /// The suite with additional visitors (statistics, debugging) appended.
    pub fn suite_with(&self, extra: Vec<Rc<dyn Visitor>>) -> Result<VisitorSuite, CanonError> {
        let mut v = self.visitors();
        v.extend(extra);
        VisitorSuite::new(v)
    }

    pub fn canonicalize(&self, g: &AttributedGraph) -> Result<RunReport, CanonError> {
        canonicalize(g, &self.suite()?)
    }

    /// The canonical form of `g` under this configuration.
    pub fn canonical_form(&self, g: &AttributedGraph) -> Result<AttributedGraph, CanonError> {
        let report = self.canonicalize(g)?;
        Ok(g.permuted(&report.canonical).expect("canonical labeling has the graph's size"))
    }
}

/// A uniformly random permutation of `0..n`.
pub fn random_permutation(n: usize, rng: &mut impl rand::Rng) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Permutation::from_images(images).expect("shuffle is a bijection")
}

/// Result of one repetition.
#[derive(Debug)]
pub struct Repetition {
    /// The relabeling applied to the input.
    pub relabeling: Permutation,
    pub report: RunReport,
    /// Canonical form of the relabeled input.
    pub canonical_form: AttributedGraph,
    pub elapsed: std::time::Duration,
}

/// Canonizes `reps` seeded random relabelings of `g` without comparing the
/// results. Repetition 0 uses the identity when `reps` is 1, so a single run
/// is the plain input. `extra` supplies per-run instrumentation visitors.
pub fn relabeled_runs(
    g: &AttributedGraph,
    config: &RunConfig,
    reps: usize,
    seed: u64,
    extra: impl Fn() -> Vec<Rc<dyn Visitor>>,
) -> Result<Vec<Repetition>, CanonError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Repetition> = Vec::with_capacity(reps.max(1));
    for _ in 0..reps.max(1) {
        let relabeling = if reps <= 1 {
            Permutation::identity(g.n())
        } else {
            random_permutation(g.n(), &mut rng)
        };
        let h = g.permuted(&relabeling).expect("same size");
        let suite = config.suite_with(extra())?;
        let start = std::time::Instant::now();
        let report = canonicalize(&h, &suite)?;
        let elapsed = start.elapsed();
        let canonical_form = h.permuted(&report.canonical).expect("same size");
        out.push(Repetition {
            relabeling,
            report,
            canonical_form,
            elapsed,
        });
    }
    Ok(out)
}

/// Index of the first repetition whose canonical form differs from the
/// first one.
pub fn first_disagreement(runs: &[Repetition]) -> Option<usize> {
    let first = runs.first()?;
    runs.iter().position(|r| !r.canonical_form.repr_eq(&first.canonical_form))
}

/// [`relabeled_runs`] followed by the agreement check.
pub fn run_repetitions(
    g: &AttributedGraph,
    config: &RunConfig,
    reps: usize,
    seed: u64,
    extra: impl Fn() -> Vec<Rc<dyn Visitor>>,
) -> Result<Vec<Repetition>, CanonError> {
    let runs = relabeled_runs(g, config, reps, seed, extra)?;
    match first_disagreement(&runs) {
        Some(repetition) => Err(CanonError::Disagreement { repetition }),
        None => Ok(runs),
    }
}

impl Repetition {
    /// Canonical labeling of the original input: the relabeling followed by
    /// the labeling found for the relabeled graph.
    pub fn input_labeling(&self) -> Permutation {
        self.relabeling.compose(&self.report.canonical).expect("same size")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_72_configs() {
        assert_eq!(RunConfig::grid().len(), 72);
    }

    #[test]
    fn invariant_set_parsing_is_order_insensitive() {
        let a: InvariantSet = "t,pl".parse().unwrap();
        let b: InvariantSet = "pl , t".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "pl,t");
        assert!("x".parse::<InvariantSet>().is_err());
        assert_eq!("".parse::<InvariantSet>().unwrap(), InvariantSet::NONE);
    }

    #[test]
    fn input_labeling_maps_the_input_to_the_canonical_form() {
        let g = crate::gen::petersen();
        let runs = run_repetitions(&g, &RunConfig::default(), 3, 9, Vec::new).unwrap();
        for r in &runs {
            assert!(g.permuted(&r.input_labeling()).unwrap().repr_eq(&r.canonical_form));
        }
    }

    #[test]
    fn single_repetition_uses_the_input_as_is() {
        let g = crate::gen::cycle(5);
        let runs = relabeled_runs(&g, &RunConfig::default(), 1, 3, Vec::new).unwrap();
        assert!(runs[0].relabeling.is_identity());
    }

    #[test]
    fn every_config_builds_a_valid_suite() {
        for c in RunConfig::grid() {
            c.suite().unwrap();
            c.clone().without_pruning().suite().unwrap();
        }
    }
}
