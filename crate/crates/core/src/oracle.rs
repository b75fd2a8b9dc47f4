//! Brute-force references: exhaustive canonization and automorphism
//! enumeration. Deliberately naive.

use crate::error::CanonError;
use crate::graph::{AdjacencyForm, AttributedGraph};
use crate::perm::{OrbitPartition, Permutation};

pub const MAX_CANON_N: usize = 9;
pub const MAX_AUT_N: usize = 8;

/// Calls `f` with every permutation of `0..n` in lexicographic order.
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        // next permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { return };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

fn form_under(g: &AttributedGraph, images: &[usize], inverse: &mut [usize]) -> AdjacencyForm {
    for (v, &i) in images.iter().enumerate() {
        inverse[i] = v;
    }
    AdjacencyForm::of_permuted(g, |i| inverse[i], |v| images[v])
}

/// The representation-minimal graph among all relabelings of `g`.
pub fn brute_canon(g: &AttributedGraph) -> Result<AttributedGraph, CanonError> {
    let n = g.n();
    if n > MAX_CANON_N {
        return Err(CanonError::TooLarge { n, max: MAX_CANON_N });
    }
    if n == 0 {
        return Err(CanonError::EmptyGraph);
    }
    let mut best: Option<(AdjacencyForm, Vec<usize>)> = None;
    let mut inverse = vec![0; n];
    for_each_permutation(n, |p| {
        let form = form_under(g, p, &mut inverse);
        if best.as_ref().is_none_or(|(b, _)| form < *b) {
            best = Some((form, p.to_vec()));
        }
    });
    let (_, images) = best.expect("at least one permutation");
    Ok(g.permuted(&Permutation::from_images(images).expect("bijection")).expect("same size"))
}

/// Every automorphism of `g`, identity included, in lexicographic order.
pub fn brute_aut(g: &AttributedGraph) -> Result<Vec<Permutation>, CanonError> {
    let n = g.n();
    if n > MAX_AUT_N {
        return Err(CanonError::TooLarge { n, max: MAX_AUT_N });
    }
    let mut out = Vec::new();
    let mut images = Vec::new();
    for_each_permutation(n, |p| {
        images.clear();
        images.extend_from_slice(p);
        let gamma = Permutation::from_images(images.clone()).expect("bijection");
        if g.is_automorphism(&gamma) {
            out.push(gamma);
        }
    });
    Ok(out)
}

/// Orbit partition of `V` under the given permutations, as sorted classes.
pub fn orbit_classes(n: usize, gens: &[Permutation]) -> Vec<Vec<usize>> {
    let mut orbits = OrbitPartition::new(n);
    for g in gens {
        orbits.union_permutation(g);
    }
    orbits.classes()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> AttributedGraph {
        AttributedGraph::from_edges_1based(n, edges).unwrap()
    }

    #[test]
    fn permutation_enumeration_counts() {
        let mut c = 0;
        for_each_permutation(5, |_| c += 1);
        assert_eq!(c, 120);
    }

    #[test]
    fn single_edge_is_its_own_canon() {
        let e = g(2, &[(1, 2)]);
        assert!(brute_canon(&e).unwrap().repr_eq(&e));
    }

    #[test]
    fn automorphisms_of_small_graphs() {
        assert_eq!(brute_aut(&g(3, &[(1, 2), (2, 3), (1, 3)])).unwrap().len(), 6);
        let p3 = brute_aut(&g(3, &[(1, 2), (2, 3)])).unwrap();
        assert_eq!(p3.len(), 2);
        assert_eq!(p3[1].to_string(), "(1 3)");
    }

    #[test]
    fn figure_pair_share_a_canon() {
        let g1 = g(4, &[(1, 4), (2, 3), (2, 4), (3, 4)]);
        let g2 = g(4, &[(1, 4), (2, 4), (3, 4), (2, 3)]);
        assert!(brute_canon(&g1).unwrap().repr_eq(&brute_canon(&g2).unwrap()));
        let auts = brute_aut(&g1).unwrap();
        assert!(auts.iter().any(|a| a.to_string() == "(2 3)"));
    }

    #[test]
    fn triangle_plus_isolated_vertex_relabelings_agree() {
        let base = g(4, &[(1, 2), (2, 3), (1, 3)]);
        let want = brute_canon(&base).unwrap();
        for_each_permutation(4, |p| {
            let h = base.permuted(&Permutation::from_images(p.to_vec()).unwrap()).unwrap();
            assert!(brute_canon(&h).unwrap().repr_eq(&want));
        });
    }

    #[test]
    fn automorphisms_form_a_group() {
        let c5 = g(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)]);
        let auts = brute_aut(&c5).unwrap();
        assert_eq!(auts.len(), 10);
        for a in &auts {
            for b in &auts {
                let ab = a.compose(b).unwrap();
                assert!(auts.contains(&ab));
            }
        }
    }

    #[test]
    fn size_guards() {
        assert!(matches!(
            brute_canon(&AttributedGraph::from_edges(10, &[]).unwrap()),
            Err(CanonError::TooLarge { .. })
        ));
        assert!(brute_aut(&AttributedGraph::from_edges(9, &[]).unwrap()).is_err());
    }
}
