//! Small graph families for tests, examples and the `gen` subcommand.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{AttributedGraph, EdgeAttr, VertexAttr};

fn build(n: usize, edges: Vec<(usize, usize)>) -> AttributedGraph {
    AttributedGraph::from_edges(n, &edges).expect("generated edges are valid")
}

/// Erdős-Rényi graph: every pair is an edge with probability `p`.
pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> AttributedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    build(n, edges)
}

/// Uniform-ish random `d`-regular simple graph by the pairing model with
/// restarts. `n * d` must be even and `d < n`.
pub fn random_regular(n: usize, d: usize, rng: &mut impl Rng) -> Option<AttributedGraph> {
    if d >= n || (n * d) % 2 == 1 {
        return None;
    }
    'attempt: for _ in 0..1000 {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        points.shuffle(rng);
        let mut seen = std::collections::HashSet::new();
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in points.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return Some(build(n, edges));
    }
    None
}

/// Circulant graph: `i ~ i ± j (mod n)` for every jump `j`.
pub fn circulant(n: usize, jumps: &[usize]) -> AttributedGraph {
    let mut set = std::collections::BTreeSet::new();
    for i in 0..n {
        for &j in jumps {
            let k = (i + j) % n;
            if k != i {
                set.insert((i.min(k), i.max(k)));
            }
        }
    }
    build(n, set.into_iter().collect())
}

pub fn cycle(n: usize) -> AttributedGraph {
    circulant(n, &[1])
}

pub fn path(n: usize) -> AttributedGraph {
    build(n, (1..n).map(|i| (i - 1, i)).collect())
}

pub fn complete(n: usize) -> AttributedGraph {
    build(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect())
}

/// Star with `leaves` leaves; vertex 0 is the center.
pub fn star(leaves: usize) -> AttributedGraph {
    build(leaves + 1, (1..=leaves).map(|v| (0, v)).collect())
}

pub fn petersen() -> AttributedGraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((i + 5, (i + 2) % 5 + 5));
    }
    build(10, edges)
}

/// The ten-vertex graph used throughout the documentation as the worked
/// search-tree example.
pub fn worked_example() -> AttributedGraph {
    AttributedGraph::from_edges_1based(
        10,
        &[
            (1, 3),
            (1, 4),
            (2, 5),
            (2, 6),
            (3, 7),
            (3, 10),
            (4, 8),
            (4, 9),
            (5, 7),
            (5, 9),
            (6, 8),
            (6, 10),
            (7, 9),
            (8, 10),
        ],
    )
    .expect("valid")
}

/// Disjoint union; vertices of `b` follow those of `a`.
pub fn disjoint_union(a: &AttributedGraph, b: &AttributedGraph) -> AttributedGraph {
    let off = a.n();
    let edges = a
        .edges()
        .iter()
        .copied()
        .chain(b.edges().iter().map(|&(u, v, x)| (u + off, v + off, x)));
    let attrs = a.vertex_attrs().iter().chain(b.vertex_attrs()).copied().collect();
    AttributedGraph::new(off + b.n(), edges, attrs).expect("valid")
}

/// Complement of the underlying simple graph; attributes of vertices are
/// kept, edges get the default attribute.
pub fn complement(g: &AttributedGraph) -> AttributedGraph {
    let n = g.n();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if g.neighbors(u).binary_search_by_key(&v, |&(w, _)| w).is_err() {
                edges.push((u, v, 0));
            }
        }
    }
    AttributedGraph::new(n, edges, g.vertex_attrs().to_vec()).expect("valid")
}

/// Copy of `g` with vertex attributes drawn from `0..k`.
pub fn with_random_vertex_attrs(g: &AttributedGraph, k: u64, rng: &mut impl Rng) -> AttributedGraph {
    let attrs: Vec<VertexAttr> = (0..g.n()).map(|_| rng.gen_range(0..k)).collect();
    AttributedGraph::new(g.n(), g.edges().iter().copied(), attrs).expect("valid")
}

/// Copy of `g` with edge attributes drawn from `0..k`.
pub fn with_random_edge_attrs(g: &AttributedGraph, k: u64, rng: &mut impl Rng) -> AttributedGraph {
    let edges: Vec<(usize, usize, EdgeAttr)> = g
        .edges()
        .iter()
        .map(|&(u, v, _)| (u, v, rng.gen_range(0..k)))
        .collect();
    AttributedGraph::new(g.n(), edges, g.vertex_attrs().to_vec()).expect("valid")
}

/// Named test corpus: random G(n,p) for `n` in 6..=32 and `p` in
/// {0.1, 0.3, 0.5}, random 3-regular graphs, circulants, classic
/// symmetric graphs, and vertex- and edge-attributed variants.
pub fn corpus(rng: &mut impl Rng) -> Vec<(String, AttributedGraph)> {
    let mut out = Vec::new();
    for n in 6..=32 {
        for p in [0.1, 0.3, 0.5] {
            out.push((format!("gnp-{n}-{p}"), gnp(n, p, rng)));
        }
    }
    for n in (6..=32).step_by(2) {
        if let Some(g) = random_regular(n, 3, rng) {
            out.push((format!("reg3-{n}"), g));
        }
    }
    for n in 6..=24 {
        out.push((format!("cycle-{n}"), cycle(n)));
        out.push((format!("circ-{n}-1-2"), circulant(n, &[1, 2])));
        if n >= 8 {
            out.push((format!("circ-{n}-1-3"), circulant(n, &[1, 3])));
        }
    }
    out.push(("petersen".into(), petersen()));
    out.push(("worked-example".into(), worked_example()));
    out.push(("star-5".into(), star(5)));
    out.push(("path-7".into(), path(7)));
    out.push(("k6".into(), complete(6)));
    out.push(("2c5".into(), disjoint_union(&cycle(5), &cycle(5))));
    out.push(("c6+k3".into(), disjoint_union(&cycle(6), &complete(3))));
    out.push(("petersen-complement".into(), complement(&petersen())));
    for n in (6..=30).step_by(2) {
        let base = gnp(n, 0.3, rng);
        out.push((format!("vattr-gnp-{n}"), with_random_vertex_attrs(&base, 3, rng)));
        out.push((format!("eattr-gnp-{n}"), with_random_edge_attrs(&base, 3, rng)));
        let c = circulant(n, &[1, 2]);
        out.push((format!("vattr-circ-{n}"), with_random_vertex_attrs(&c, 2, rng)));
        out.push((format!("eattr-circ-{n}"), with_random_edge_attrs(&c, 2, rng)));
        if let Some(r) = random_regular(n, 3, rng) {
            out.push((format!("eattr-reg3-{n}"), with_random_edge_attrs(&r, 2, rng)));
        }
    }
    out
}

/// Corpus of graphs with at most `max_n` vertices: every graph of the main
/// families at small sizes plus random ones.
pub fn small_corpus(max_n: usize, count: usize, rng: &mut impl Rng) -> Vec<(String, AttributedGraph)> {
    let mut out = Vec::new();
    for n in 3..=max_n {
        out.push((format!("cycle-{n}"), cycle(n)));
        out.push((format!("path-{n}"), path(n)));
        out.push((format!("star-{}", n - 1), star(n - 1)));
        out.push((format!("k{n}"), complete(n)));
        out.push((format!("empty-{n}"), AttributedGraph::from_edges(n, &[]).expect("valid")));
    }
    let mut i = 0;
    while out.len() < count {
        let n = 3 + i % (max_n - 2);
        let p = [0.2, 0.35, 0.5, 0.65][i % 4];
        let g = gnp(n, p, rng);
        let g = match i % 5 {
            3 => with_random_vertex_attrs(&g, 2, rng),
            4 => with_random_edge_attrs(&g, 2, rng),
            _ => g,
        };
        out.push((format!("small-{i}-{n}"), g));
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn family_sizes() {
        assert_eq!(cycle(6).num_edges(), 6);
        assert_eq!(complete(5).num_edges(), 10);
        assert_eq!(petersen().num_edges(), 15);
        assert_eq!(worked_example().num_edges(), 14);
        assert_eq!(circulant(8, &[1, 4]).num_edges(), 12);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let r = random_regular(12, 3, &mut rng).unwrap();
        assert!((0..12).all(|v| r.degree(v) == 3));
        assert!(random_regular(5, 3, &mut rng).is_none());
    }

    #[test]
    fn corpus_is_large_enough() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        assert!(corpus(&mut rng).len() >= 200);
        let small = small_corpus(8, 300, &mut rng);
        assert_eq!(small.len(), 300);
        assert!(small.iter().all(|(_, g)| g.n() <= 8));
    }

    #[test]
    fn complement_of_complete_is_empty() {
        assert_eq!(complement(&complete(5)).num_edges(), 0);
    }
}
