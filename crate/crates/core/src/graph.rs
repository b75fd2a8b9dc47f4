//! Attributed undirected graphs and their representation order.
//!
//! Vertices are the indices `0..n`. Every text format in this crate renders
//! them 1-based. Vertex and edge attributes are opaque `u64` values that are
//! only ever compared.

use std::cmp::Ordering;
use std::fmt;

use crate::error::GraphError;
use crate::perm::Permutation;

/// A vertex attribute. Attribute-free graphs use [`DEFAULT_ATTR`].
pub type VertexAttr = u64;
/// An edge attribute.
pub type EdgeAttr = u64;

pub const DEFAULT_ATTR: u64 = 0;

/// An undirected multigraph without self-loops, with one attribute per
/// vertex and per edge.
#[derive(Clone, Debug)]
pub struct AttributedGraph {
    n: usize,
    edges: Vec<(usize, usize, EdgeAttr)>,
    vertex_attrs: Vec<VertexAttr>,
    // neighbor lists sorted by (neighbor, attr)
    adj: Vec<Vec<(usize, EdgeAttr)>>,
    uniform_edge_attrs: bool,
}

impl AttributedGraph {
    /// Builds a graph from 0-based edges. `vertex_attrs` must be empty (all
    /// default) or have exactly `n` entries.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, EdgeAttr)>,
        vertex_attrs: Vec<VertexAttr>,
    ) -> Result<Self, GraphError> {
        let vertex_attrs = if vertex_attrs.is_empty() {
            vec![DEFAULT_ATTR; n]
        } else if vertex_attrs.len() != n {
            return Err(GraphError::AttributeCount {
                expected: n,
                found: vertex_attrs.len(),
            });
        } else {
            vertex_attrs
        };
        let mut adj = vec![Vec::new(); n];
        let mut stored = Vec::new();
        for (u, v, a) in edges {
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: u.max(v) + 1,
                    n,
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u + 1 });
            }
            adj[u].push((v, a));
            adj[v].push((u, a));
            stored.push((u, v, a));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let uniform_edge_attrs = stored.windows(2).all(|w| w[0].2 == w[1].2);
        Ok(AttributedGraph {
            n,
            edges: stored,
            vertex_attrs,
            adj,
            uniform_edge_attrs,
        })
    }

    /// Convenience constructor for attribute-free graphs with 0-based edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::new(
            n,
            edges.iter().map(|&(u, v)| (u, v, DEFAULT_ATTR)),
            Vec::new(),
        )
    }

    /// Attribute-free graph from 1-based edges, the notation used in tests
    /// and documentation.
    pub fn from_edges_1based(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut zero = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == 0 || v == 0 {
                return Err(GraphError::VertexOutOfRange { vertex: 0, n });
            }
            zero.push((u - 1, v - 1));
        }
        Self::from_edges(n, &zero)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, EdgeAttr)] {
        &self.edges
    }

    pub fn vertex_attr(&self, v: usize) -> VertexAttr {
        self.vertex_attrs[v]
    }

    pub fn vertex_attrs(&self) -> &[VertexAttr] {
        &self.vertex_attrs
    }

    /// Incident edges of `v` as `(neighbor, attribute)`, sorted.
    pub fn neighbors(&self, v: usize) -> &[(usize, EdgeAttr)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// True when every edge carries the same attribute.
    pub fn has_uniform_edge_attrs(&self) -> bool {
        self.uniform_edge_attrs
    }

    /// Returns `G^γ`: edge `(u, v, a)` becomes `(u^γ, v^γ, a)` and the
    /// attribute of `v` moves to `v^γ`.
    pub fn permuted(&self, gamma: &Permutation) -> Result<AttributedGraph, GraphError> {
        if gamma.len() != self.n {
            return Err(GraphError::SizeMismatch {
                left: self.n,
                right: gamma.len(),
            });
        }
        let mut attrs = vec![DEFAULT_ATTR; self.n];
        for v in 0..self.n {
            attrs[gamma.image(v)] = self.vertex_attrs[v];
        }
        Self::new(
            self.n,
            self.edges
                .iter()
                .map(|&(u, v, a)| (gamma.image(u), gamma.image(v), a)),
            attrs,
        )
    }

    /// The globally ordered adjacency form of this graph.
    pub fn adjacency_form(&self) -> AdjacencyForm {
        AdjacencyForm::of_permuted(self, |v| v, |i| i)
    }

    /// Total representation order: vertex attributes by index first, then
    /// the globally ordered adjacency lists.
    pub fn compare_representation(&self, other: &AttributedGraph) -> Result<Ordering, GraphError> {
        if self.n != other.n {
            return Err(GraphError::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self.adjacency_form().cmp(&other.adjacency_form()))
    }

    /// `true` iff the graphs are representationally equal.
    pub fn repr_eq(&self, other: &AttributedGraph) -> bool {
        matches!(self.compare_representation(other), Ok(Ordering::Equal))
    }

    /// `true` iff `gamma` is an automorphism, i.e. `G^γ` is
    /// representationally equal to `G`.
    pub fn is_automorphism(&self, gamma: &Permutation) -> bool {
        if gamma.len() != self.n {
            return false;
        }
        let inv = gamma.inverse();
        // G^γ at index i is vertex i^{γ̄} of G.
        AdjacencyForm::of_permuted(self, |i| inv.image(i), |v| gamma.image(v)) == self.adjacency_form()
    }
}

/// Globally ordered adjacency lists: incidence lists sorted by neighbor
/// index with parallel edges ordered by attribute, plus the vertex
/// attribute sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdjacencyForm {
    vertex_attrs: Vec<VertexAttr>,
    offsets: Vec<usize>,
    entries: Vec<(usize, EdgeAttr)>,
}

impl AdjacencyForm {
    /// Form of the graph whose vertex `i` is `vertex_at(i)` of `g`, with
    /// neighbors relabeled through `index_of`.
    pub(crate) fn of_permuted(
        g: &AttributedGraph,
        vertex_at: impl Fn(usize) -> usize,
        index_of: impl Fn(usize) -> usize,
    ) -> AdjacencyForm {
        let n = g.n();
        let mut vertex_attrs = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n + 1);
        let mut entries = Vec::with_capacity(2 * g.num_edges());
        offsets.push(0);
        for i in 0..n {
            let v = vertex_at(i);
            vertex_attrs.push(g.vertex_attr(v));
            let start = entries.len();
            entries.extend(g.neighbors(v).iter().map(|&(u, a)| (index_of(u), a)));
            entries[start..].sort_unstable();
            offsets.push(entries.len());
        }
        AdjacencyForm {
            vertex_attrs,
            offsets,
            entries,
        }
    }

    pub fn n(&self) -> usize {
        self.vertex_attrs.len()
    }

    pub fn vertex_attrs(&self) -> &[VertexAttr] {
        &self.vertex_attrs
    }

    pub fn list(&self, i: usize) -> &[(usize, EdgeAttr)] {
        &self.entries[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Compares the form of the permuted graph `g` (vertex `i` is
    /// `vertex_at[i]`, relabeling through `index_of`) against `self`
    /// without materializing it. Stops at the first difference.
    pub(crate) fn compare_permuted(
        &self,
        g: &AttributedGraph,
        vertex_at: &[usize],
        index_of: &[usize],
        scratch: &mut Vec<(usize, EdgeAttr)>,
    ) -> Ordering {
        let n = self.n();
        for i in 0..n {
            match g.vertex_attr(vertex_at[i]).cmp(&self.vertex_attrs[i]) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        for i in 0..n {
            let v = vertex_at[i];
            scratch.clear();
            scratch.extend(g.neighbors(v).iter().map(|&(u, a)| (index_of[u], a)));
            scratch.sort_unstable();
            match cmp_list(scratch, self.list(i)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// Renders "1: 2,3 / 2: 1 / ..." (1-based), the notation of the
    /// adjacency examples in the book.
    pub fn render(&self) -> String {
        (0..self.n())
            .map(|i| {
                let list: Vec<String> = self.list(i).iter().map(|(u, _)| (u + 1).to_string()).collect();
                format!("{}: {}", i + 1, list.join(","))
            })
            .collect::<Vec<_>>()
            .join(" / ")
    }
}

impl AdjacencyForm {
    /// DIMACS text of the form: vertex attributes, then every edge once in
    /// adjacency order. Equal forms give byte-identical text.
    pub fn to_dimacs(&self) -> String {
        let m = self.entries.len() / 2;
        let mut out = format!("p edge {} {}\n", self.n(), m);
        for (i, &a) in self.vertex_attrs.iter().enumerate() {
            if a != DEFAULT_ATTR {
                out.push_str(&format!("n {} {}\n", i + 1, a));
            }
        }
        for i in 0..self.n() {
            for &(j, a) in self.list(i).iter().filter(|&&(j, _)| j > i) {
                if a == DEFAULT_ATTR {
                    out.push_str(&format!("e {} {}\n", i + 1, j + 1));
                } else {
                    out.push_str(&format!("f {} {} {}\n", i + 1, j + 1, a));
                }
            }
        }
        out
    }
}

fn cmp_list(a: &[(usize, EdgeAttr)], b: &[(usize, EdgeAttr)]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl Ord for AdjacencyForm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertex_attrs
            .cmp(&other.vertex_attrs)
            .then_with(|| {
                for i in 0..self.n().min(other.n()) {
                    match cmp_list(self.list(i), other.list(i)) {
                        Ordering::Equal => {}
                        ord => return ord,
                    }
                }
                self.n().cmp(&other.n())
            })
    }
}

impl PartialOrd for AdjacencyForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AdjacencyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // G1 of the small adjacency example: 1: 4 / 2: 3,4 / 3: 2,4 / 4: 1,2,3
    fn g1() -> AttributedGraph {
        AttributedGraph::from_edges_1based(4, &[(1, 4), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    #[test]
    fn adjacency_form_of_g1() {
        assert_eq!(g1().adjacency_form().render(), "1: 4 / 2: 3,4 / 3: 2,4 / 4: 1,2,3");
    }

    #[test]
    fn form_dimacs_lists_each_edge_once_with_attributes() {
        let g = AttributedGraph::new(3, vec![(2, 0, 5), (1, 0, 0)], vec![0, 0, 7]).unwrap();
        assert_eq!(g.adjacency_form().to_dimacs(), "p edge 3 2\nn 3 7\ne 1 2\nf 1 3 5\n");
    }

    #[test]
    fn permuting_g1_gives_g() {
        let pi1 = Permutation::parse_cycles("(1 2 4)(3)", 4).unwrap();
        let g = g1().permuted(&pi1).unwrap();
        assert_eq!(g.adjacency_form().render(), "1: 2,3,4 / 2: 1 / 3: 1,4 / 4: 1,3");
        assert!(!g.repr_eq(&g1()));
    }

    #[test]
    fn g1_and_g2_are_representationally_equal() {
        // G2 is G pulled back through pi2 = (1 2 3 4)
        let pi1 = Permutation::parse_cycles("(1 2 4)", 4).unwrap();
        let pi2 = Permutation::parse_cycles("(1 2 3 4)", 4).unwrap();
        let g = g1().permuted(&pi1).unwrap();
        let g2 = g.permuted(&pi2.inverse()).unwrap();
        assert!(g1().repr_eq(&g2));
        assert!(g.repr_eq(&g));
    }

    #[test]
    fn single_vertex_and_parallel_edges() {
        let g = AttributedGraph::new(1, [], vec![]).unwrap();
        assert_eq!(g.n(), 1);
        let m = AttributedGraph::new(3, [(0, 1, 7), (0, 1, 3)], vec![]).unwrap();
        assert_eq!(m.neighbors(0), &[(1, 3), (1, 7)]);
        assert_eq!(m.num_edges(), 2);
        assert!(!m.has_uniform_edge_attrs());
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            AttributedGraph::from_edges(3, &[(0, 3)]),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            AttributedGraph::from_edges(3, &[(1, 1)]),
            Err(GraphError::SelfLoop { vertex: 2 })
        ));
        assert!(matches!(
            AttributedGraph::new(3, [], vec![1, 2]),
            Err(GraphError::AttributeCount { .. })
        ));
    }

    #[test]
    fn size_mismatch() {
        let g = g1();
        let h = AttributedGraph::from_edges(3, &[]).unwrap();
        assert!(g.compare_representation(&h).is_err());
        assert!(g.permuted(&Permutation::identity(3)).is_err());
    }

    #[test]
    fn vertex_attributes_compare_first() {
        let a = AttributedGraph::new(2, [(0, 1, 0)], vec![1, 2]).unwrap();
        let b = AttributedGraph::new(2, [], vec![2, 1]).unwrap();
        assert_eq!(a.compare_representation(&b).unwrap(), Ordering::Less);
    }

    #[test]
    fn automorphism_check() {
        let g = g1();
        assert!(g.is_automorphism(&Permutation::parse_cycles("(2 3)", 4).unwrap()));
        assert!(!g.is_automorphism(&Permutation::parse_cycles("(1 2)", 4).unwrap()));
    }
}
