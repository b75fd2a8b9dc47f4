//! Permutations, the append-only generator list, and orbit tracking.
//!
//! Composition is left to right: `v^(αβ) = (v^α)^β`.

use std::fmt;

use crate::error::PermError;

/// A bijection on `0..n`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(PermError::NotBijection { n });
            }
        }
        Ok(Permutation { images })
    }

    /// The transposition `(u v)` on `0..n`.
    pub fn transposition(n: usize, u: usize, v: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(u, v);
        p
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn image(&self, v: usize) -> usize {
        self.images[v]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// `self · other`, mapping `v` to `(v^self)^other`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.len() != other.len() {
            return Err(PermError::SizeMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Permutation {
            images: self.images.iter().map(|&v| other.images[v]).collect(),
        })
    }

    /// Right-multiplies in place by the transposition `(u v)`.
    pub fn then_swap(&mut self, u: usize, v: usize) {
        for x in self.images.iter_mut() {
            if *x == u {
                *x = v;
            } else if *x == v {
                *x = u;
            }
        }
    }

    pub fn fixes(&self, v: usize) -> bool {
        self.images[v] == v
    }

    /// `true` iff every vertex of `seq` is a fixed point.
    pub fn fixes_sequence(&self, seq: &[usize]) -> bool {
        seq.iter().all(|&v| self.fixes(v))
    }

    /// Disjoint cycles of length at least two, each starting at its minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                cycle.push(v);
                v = self.images[v];
            }
            out.push(cycle);
        }
        out
    }

    /// Parses 1-based cycle notation such as `"(1 2 4)(3)"`. Fixed points
    /// may be written or omitted; `"(1)"` and `""` are the identity.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body_end = rest
                .strip_prefix('(')
                .and_then(|r| r.find(')'))
                .ok_or_else(|| PermError::Syntax(text.to_string()))?;
            let body = &rest[1..body_end + 1];
            let cycle: Vec<usize> = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| match s.parse::<usize>() {
                    Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                    _ => Err(PermError::Syntax(text.to_string())),
                })
                .collect::<Result<_, _>>()?;
            for &v in &cycle {
                if std::mem::replace(&mut touched[v], true) {
                    return Err(PermError::NotBijection { n });
                }
            }
            for (i, &v) in cycle.iter().enumerate() {
                images[v] = cycle[(i + 1) % cycle.len()];
            }
            rest = rest[body_end + 2..].trim_start();
        }
        Ok(Permutation { images })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("(1)");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The list `A` of discovered automorphisms. Append-only; the generation
/// counter is the list length.
#[derive(Clone, Debug, Default)]
pub struct GeneratorSet {
    gens: Vec<Permutation>,
}

impl GeneratorSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a generator. Identities are dropped; returns whether it was
    /// stored.
    pub fn push(&mut self, gamma: Permutation) -> bool {
        if gamma.is_identity() {
            return false;
        }
        self.gens.push(gamma);
        true
    }

    pub fn generation(&self) -> usize {
        self.gens.len()
    }

    pub fn get(&self, i: usize) -> &Permutation {
        &self.gens[i]
    }

    pub fn as_slice(&self) -> &[Permutation] {
        &self.gens
    }

    /// Indices of the generators appended at or after `from_generation`
    /// that fix every vertex of `seq`.
    pub fn filter_stabilizer(&self, seq: &[usize], from_generation: usize) -> Vec<usize> {
        (from_generation..self.gens.len())
            .filter(|&i| self.gens[i].fixes_sequence(seq))
            .collect()
    }

    pub fn into_vec(self) -> Vec<Permutation> {
        self.gens
    }
}

/// Union-find over `0..n` whose representatives are class minima.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    parent: Vec<usize>,
}

impl OrbitPartition {
    pub fn new(n: usize) -> Self {
        OrbitPartition {
            parent: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Minimum member of the class of `v`.
    pub fn orbit_min(&mut self, v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = v;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn same_orbit(&mut self, u: usize, v: usize) -> bool {
        self.orbit_min(u) == self.orbit_min(v)
    }

    /// Merges the classes of `u` and `v`; returns whether they were distinct.
    pub fn union(&mut self, u: usize, v: usize) -> bool {
        let (a, b) = (self.orbit_min(u), self.orbit_min(v));
        if a == b {
            return false;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        true
    }

    /// Merges `v` with `v^γ` for every `v`.
    pub fn union_permutation(&mut self, gamma: &Permutation) {
        for v in 0..gamma.len() {
            self.union(v, gamma.image(v));
        }
    }

    /// Classes as sorted vectors, ordered by minimum.
    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut by_min: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            let m = self.orbit_min(v);
            by_min[m].push(v);
        }
        by_min.into_iter().filter(|c| !c.is_empty()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str, n: usize) -> Permutation {
        Permutation::parse_cycles(s, n).unwrap()
    }

    #[test]
    fn compose_with_inverse_gives_swap() {
        let pi1 = p("(1 2 4)(3)", 4);
        let pi2 = p("(1 2 3 4)", 4);
        let prime = pi1.compose(&pi2.inverse()).unwrap();
        assert_eq!(prime, p("(2 3)(1)(4)", 4));
        assert_eq!(prime.to_string(), "(2 3)");
    }

    #[test]
    fn identity_laws() {
        let a = p("(1 3 2)(4 5)", 5);
        let id = Permutation::identity(5);
        assert_eq!(a.compose(&id).unwrap(), a);
        assert!(a.compose(&a.inverse()).unwrap().is_identity());
        assert_eq!(id.to_string(), "(1)");
        assert!(a.compose(&Permutation::identity(4)).is_err());
    }

    #[test]
    fn parse_errors() {
        assert!(Permutation::parse_cycles("(1 2", 3).is_err());
        assert!(Permutation::parse_cycles("(1 4)", 3).is_err());
        assert!(Permutation::parse_cycles("(1 2)(2 3)", 3).is_err());
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(p("", 3).is_identity());
    }

    #[test]
    fn fixes_sequence_examples() {
        let id = Permutation::identity(4);
        assert!(id.fixes_sequence(&[0, 1, 2, 3]));
        let t = p("(2 3)", 4);
        assert!(t.fixes_sequence(&[0, 3]));
        assert!(!t.fixes_sequence(&[1]));
    }

    #[test]
    fn filter_stabilizer_examples() {
        let mut a = GeneratorSet::new();
        a.push(p("(2 3)", 4));
        assert_eq!(a.filter_stabilizer(&[0], 0), vec![0]);
        assert!(a.filter_stabilizer(&[1], 0).is_empty());

        let mut b = GeneratorSet::new();
        b.push(p("(1 2)(3 4)", 4));
        b.push(p("(3 4)", 4));
        // A_τ for τ = (1, 2) by definition: keep γ with 1^γ = 1, 2^γ = 2
        let expected: Vec<usize> = (0..b.generation())
            .filter(|&i| b.get(i).image(0) == 0 && b.get(i).image(1) == 1)
            .collect();
        assert_eq!(b.filter_stabilizer(&[0, 1], 0), expected);
        assert_eq!(expected, vec![1]);
        assert!(b.filter_stabilizer(&[0, 1], 2).is_empty());
    }

    #[test]
    fn identity_not_stored() {
        let mut a = GeneratorSet::new();
        assert!(!a.push(Permutation::identity(3)));
        assert_eq!(a.generation(), 0);
    }

    #[test]
    fn orbit_examples() {
        let mut o = OrbitPartition::new(5);
        o.union_permutation(&p("(2 3)", 5));
        assert_eq!(o.classes(), vec![vec![0], vec![1, 2], vec![3], vec![4]]);
        let mut o = OrbitPartition::new(5);
        o.union_permutation(&p("(1 2)", 5));
        o.union_permutation(&p("(2 3)", 5));
        assert!(o.same_orbit(0, 2));
        assert_eq!(o.orbit_min(2), 0);
        assert!(!o.same_orbit(0, 3));
        let before = o.classes();
        o.union_permutation(&Permutation::identity(5));
        assert_eq!(o.classes(), before);
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    fn brute_orbits(n: usize, gens: &[Permutation]) -> Vec<Vec<usize>> {
        // closure of the group generated by gens, applied pointwise
        let mut reach = vec![vec![false; n]; n];
        for (v, row) in reach.iter_mut().enumerate() {
            row[v] = true;
            let mut stack = vec![v];
            while let Some(x) = stack.pop() {
                for g in gens {
                    let y = g.image(x);
                    if !row[y] {
                        row[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        let mut out: Vec<Vec<usize>> = Vec::new();
        for v in 0..n {
            let class: Vec<usize> = (0..n).filter(|&u| reach[v][u]).collect();
            if class[0] == v {
                out.push(class);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn group_axioms(a in arb_perm(7), b in arb_perm(7), c in arb_perm(7)) {
            let ab_c = a.compose(&b).unwrap().compose(&c).unwrap();
            let a_bc = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            prop_assert!(a.inverse().compose(&a).unwrap().is_identity());
            prop_assert_eq!(Permutation::parse_cycles(&a.to_string(), 7).unwrap(), a);
        }

        #[test]
        fn orbits_match_closure(gens in proptest::collection::vec(arb_perm(8), 0..=6)) {
            let mut o = OrbitPartition::new(8);
            for g in &gens {
                o.union_permutation(g);
            }
            prop_assert_eq!(o.classes(), brute_orbits(8, &gens));
        }

        #[test]
        fn filter_is_subset_fixing_seq(gens in proptest::collection::vec(arb_perm(5), 0..6),
                                      seq in proptest::collection::vec(0usize..5, 0..3)) {
            let mut a = GeneratorSet::new();
            for g in gens { a.push(g); }
            let kept = a.filter_stabilizer(&seq, 0);
            for i in 0..a.generation() {
                prop_assert_eq!(kept.contains(&i), a.get(i).fixes_sequence(&seq));
            }
        }
    }
}
