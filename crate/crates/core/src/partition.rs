//! Ordered partitions stored as one contiguous element array.
//!
//! A cell is identified by the position of its first element. Four arrays
//! of length `n` make up the structure: the elements, the inverse index,
//! the cell start of each vertex, and the cell length at each start.

use std::fmt;

use crate::error::PermError;
use crate::graph::AttributedGraph;
use crate::perm::Permutation;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrderedPartition {
    elements: Vec<u32>,
    position: Vec<u32>,
    cell_of: Vec<u32>,
    // valid at cell starts only
    cell_len: Vec<u32>,
    num_cells: usize,
}

impl OrderedPartition {
    /// The partition with a single cell holding `0..n`.
    pub fn unit(n: usize) -> Result<Self, PermError> {
        if n == 0 {
            return Err(PermError::Empty);
        }
        let mut cell_len = vec![0; n];
        cell_len[0] = n as u32;
        Ok(OrderedPartition {
            elements: (0..n as u32).collect(),
            position: (0..n as u32).collect(),
            cell_of: vec![0; n],
            cell_len,
            num_cells: 1,
        })
    }

    /// Builds a partition from explicit cells (0-based vertices).
    pub fn from_cells(cells: &[Vec<usize>]) -> Result<Self, PermError> {
        let n: usize = cells.iter().map(Vec::len).sum();
        if n == 0 {
            return Err(PermError::Empty);
        }
        let mut elements = Vec::with_capacity(n);
        let mut position = vec![u32::MAX; n];
        let mut cell_of = vec![0; n];
        let mut cell_len = vec![0; n];
        for cell in cells {
            if cell.is_empty() {
                return Err(PermError::Empty);
            }
            let start = elements.len() as u32;
            cell_len[start as usize] = cell.len() as u32;
            for &v in cell {
                if v >= n || position[v] != u32::MAX {
                    return Err(PermError::NotBijection { n });
                }
                position[v] = elements.len() as u32;
                cell_of[v] = start;
                elements.push(v as u32);
            }
        }
        Ok(OrderedPartition {
            elements,
            position,
            cell_of,
            cell_len,
            num_cells: cells.len(),
        })
    }

    /// Parses the 1-based rendering `"[1 2 | 3]"`; `|` separates cells.
    pub fn parse(text: &str) -> Result<Self, PermError> {
        let body = text
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| PermError::Syntax(text.to_string()))?;
        let cells = body
            .split('|')
            .map(|cell| {
                cell.split_whitespace()
                    .map(|s| match s.parse::<usize>() {
                        Ok(v) if v >= 1 => Ok(v - 1),
                        _ => Err(PermError::Syntax(text.to_string())),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_cells(&cells)
    }

    /// Cells grouped by vertex attribute, ordered by attribute.
    pub fn initial(g: &AttributedGraph) -> Result<Self, PermError> {
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.sort_by_key(|&v| (g.vertex_attr(v), v));
        let mut cells: Vec<Vec<usize>> = Vec::new();
        let mut last = None;
        for v in order {
            let a = g.vertex_attr(v);
            if last != Some(a) {
                cells.push(Vec::new());
                last = Some(a);
            }
            cells.last_mut().unwrap().push(v);
        }
        Self::from_cells(&cells)
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn is_discrete(&self) -> bool {
        self.num_cells == self.n()
    }

    pub fn is_unit(&self) -> bool {
        self.num_cells == 1
    }

    #[inline]
    pub fn vertex_at(&self, pos: usize) -> usize {
        self.elements[pos] as usize
    }

    #[inline]
    pub fn position(&self, v: usize) -> usize {
        self.position[v] as usize
    }

    /// Start position of the cell containing `v`.
    #[inline]
    pub fn cell_start(&self, v: usize) -> usize {
        self.cell_of[v] as usize
    }

    /// Start of the cell containing position `pos`.
    #[inline]
    pub fn cell_start_at(&self, pos: usize) -> usize {
        self.cell_of[self.elements[pos] as usize] as usize
    }

    /// Length of the cell starting at `start`.
    #[inline]
    pub fn cell_len(&self, start: usize) -> usize {
        self.cell_len[start] as usize
    }

    /// Vertices of the cell starting at `start`, in position order.
    pub fn cell(&self, start: usize) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.elements[start..start + self.cell_len(start)]
            .iter()
            .map(|&v| v as usize)
    }

    /// Start positions of all cells, left to right.
    pub fn cell_starts(&self) -> CellStarts<'_> {
        CellStarts { pi: self, next: 0 }
    }

    /// 1-based ordinal of the cell containing `v`.
    pub fn cell_index(&self, v: usize) -> usize {
        let start = self.cell_start(v);
        self.cell_starts().take_while(|&s| s <= start).count()
    }

    /// `π↓v`: splits `{v}` off the front of its cell. The remainder keeps
    /// its relative order.
    pub fn individualize(&mut self, v: usize) -> Result<(), PermError> {
        let start = self.cell_start(v);
        let len = self.cell_len(start);
        if len < 2 {
            return Err(PermError::Syntax(format!(
                "vertex {} is in a singleton cell",
                v + 1
            )));
        }
        let pos = self.position(v);
        self.elements.copy_within(start..pos, start + 1);
        self.elements[start] = v as u32;
        for p in start..=pos {
            self.position[self.elements[p] as usize] = p as u32;
        }
        self.cut(start, &[start + 1]);
        Ok(())
    }

    /// Cuts the cell starting at `start` at the given strictly increasing
    /// absolute positions, keeping element order. Returns the starts of the
    /// newly created cells.
    pub fn split_cell(&mut self, start: usize, cuts: &[usize]) -> Result<Vec<usize>, PermError> {
        let end = start + self.cell_len(start);
        let mut prev = start;
        for &c in cuts {
            if c <= prev || c >= end {
                return Err(PermError::Syntax(format!(
                    "cut {c} outside cell {start}..{end}"
                )));
            }
            prev = c;
        }
        self.cut(start, cuts);
        Ok(cuts.to_vec())
    }

    /// Rewrites the element order inside the cell at `start`. `order` must
    /// be a permutation of the cell's vertices.
    pub(crate) fn reorder_cell(&mut self, start: usize, order: &[usize]) {
        debug_assert_eq!(order.len(), self.cell_len(start));
        for (i, &v) in order.iter().enumerate() {
            self.elements[start + i] = v as u32;
            self.position[v] = (start + i) as u32;
        }
    }

    pub(crate) fn cut(&mut self, start: usize, cuts: &[usize]) {
        if cuts.is_empty() {
            return;
        }
        let end = start + self.cell_len(start);
        let mut bounds = Vec::with_capacity(cuts.len() + 2);
        bounds.push(start);
        bounds.extend_from_slice(cuts);
        bounds.push(end);
        for w in bounds.windows(2) {
            let (s, e) = (w[0], w[1]);
            self.cell_len[s] = (e - s) as u32;
            if s != start {
                for p in s..e {
                    self.cell_of[self.elements[p] as usize] = s as u32;
                }
            }
        }
        self.num_cells += cuts.len();
    }

    /// `true` iff `self ⪯ coarser`: `cell(u, coarser) < cell(v, coarser)`
    /// implies `cell(u, self) < cell(v, self)`.
    pub fn is_finer_or_equal(&self, coarser: &OrderedPartition) -> bool {
        if self.n() != coarser.n() {
            return false;
        }
        // cell starts are monotone in cell index; every coarse cell must
        // sit entirely before the next one in the fine order
        let mut prev_max: Option<usize> = None;
        for s in coarser.cell_starts() {
            let starts = coarser.cell(s).map(|v| self.cell_start(v));
            let (lo, hi) = starts.fold((usize::MAX, 0), |(lo, hi), x| (lo.min(x), hi.max(x)));
            if let Some(p) = prev_max {
                if lo <= p {
                    return false;
                }
            }
            prev_max = Some(hi);
        }
        true
    }

    /// Interprets a discrete partition as the permutation mapping cell
    /// index to vertex.
    pub fn as_permutation(&self) -> Result<Permutation, PermError> {
        if !self.is_discrete() {
            return Err(PermError::NotDiscrete);
        }
        Ok(Permutation::from_images(self.elements.iter().map(|&v| v as usize).collect())
            .expect("elements are a bijection"))
    }

    /// `π^γ`: every cell `W` becomes `W^γ`, cell order unchanged.
    pub fn permuted(&self, gamma: &Permutation) -> OrderedPartition {
        let cells: Vec<Vec<usize>> = self
            .cell_starts()
            .map(|s| self.cell(s).map(|v| gamma.image(v)).collect())
            .collect();
        OrderedPartition::from_cells(&cells).expect("image of a partition")
    }

    /// Cells as sets (sorted vertex lists), left to right.
    pub fn cells_sorted(&self) -> Vec<Vec<usize>> {
        self.cell_starts()
            .map(|s| {
                let mut c: Vec<usize> = self.cell(s).collect();
                c.sort_unstable();
                c
            })
            .collect()
    }

    pub(crate) fn elements(&self) -> &[u32] {
        &self.elements
    }
}

pub struct CellStarts<'a> {
    pi: &'a OrderedPartition,
    next: usize,
}

impl Iterator for CellStarts<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.next >= self.pi.n() {
            return None;
        }
        let s = self.next;
        self.next += self.pi.cell_len(s);
        Some(s)
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.cell_starts().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            let cell: Vec<String> = self.cell(s).map(|v| (v + 1).to_string()).collect();
            f.write_str(&cell.join(" "))?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn part(s: &str) -> OrderedPartition {
        OrderedPartition::parse(s).unwrap()
    }

    #[test]
    fn unit_partitions() {
        assert_eq!(OrderedPartition::unit(3).unwrap().to_string(), "[1 2 3]");
        let one = OrderedPartition::unit(1).unwrap();
        assert!(one.is_discrete() && one.is_unit());
        let ten = OrderedPartition::unit(10).unwrap();
        assert_eq!(ten.num_cells(), 1);
        assert_eq!(ten.cell_len(0), 10);
        assert!(OrderedPartition::unit(0).is_err());
    }

    #[test]
    fn initial_partition_by_attribute() {
        let g = AttributedGraph::new(5, [], vec![]).unwrap();
        assert_eq!(OrderedPartition::initial(&g).unwrap().to_string(), "[1 2 3 4 5]");
        let g = AttributedGraph::new(3, [], vec![2, 1, 1]).unwrap();
        assert_eq!(OrderedPartition::initial(&g).unwrap().to_string(), "[2 3 | 1]");
        let g = AttributedGraph::new(3, [], vec![1, 2, 3]).unwrap();
        let pi = OrderedPartition::initial(&g).unwrap();
        assert!(pi.is_discrete());
        assert_eq!(pi.to_string(), "[1 | 2 | 3]");
    }

    #[test]
    fn individualize_examples() {
        let mut pi = part("[1 2 | 7 8 9 10 | 3 4 5 6]");
        pi.individualize(0).unwrap();
        assert_eq!(pi.to_string(), "[1 | 2 | 7 8 9 10 | 3 4 5 6]");
        let mut pi = part("[1 2]");
        pi.individualize(1).unwrap();
        assert_eq!(pi.to_string(), "[2 | 1]");
        let mut pi = part("[1 | 2]");
        assert!(pi.individualize(0).is_err());
        let mut pi = part("[1 2 | 7 8 9 10 | 3 4 5 6]");
        pi.individualize(8).unwrap();
        assert_eq!(pi.to_string(), "[1 2 | 9 | 7 8 10 | 3 4 5 6]");
    }

    #[test]
    fn split_cell_examples() {
        let mut pi = part("[1 2 | 7 8 9 10 | 3 4 5 6]");
        // cell [3 4 5 6] starts at 0-based position 6
        assert_eq!(pi.split_cell(6, &[8]).unwrap(), vec![8]);
        assert_eq!(pi.to_string(), "[1 2 | 7 8 9 10 | 3 4 | 5 6]");
        assert!(pi.split_cell(2, &[]).unwrap().is_empty());
        assert_eq!(pi.split_cell(2, &[3, 4, 5]).unwrap().len(), 3);
        assert_eq!(pi.to_string(), "[1 2 | 7 | 8 | 9 | 10 | 3 4 | 5 6]");
        assert!(pi.split_cell(0, &[2]).is_err());
        assert!(pi.split_cell(0, &[0]).is_err());
    }

    #[test]
    fn finer_examples() {
        let unit = part("[1 2 3]");
        assert!(part("[1 | 2 | 3]").is_finer_or_equal(&unit));
        assert!(part("[2 3 | 1]").is_finer_or_equal(&unit));
        assert!(!part("[1 | 2 3]").is_finer_or_equal(&part("[2 3 | 1]")));
        assert!(unit.is_finer_or_equal(&unit));
    }

    #[test]
    fn as_permutation_examples() {
        let p = part("[2 | 1 | 3]").as_permutation().unwrap();
        assert_eq!(p.images(), &[1, 0, 2]);
        assert!(part("[1 | 2 | 3 | 4]").as_permutation().unwrap().is_identity());
        let leaf = part("[1|2|7|10|8|9|6|5|4|3]").as_permutation().unwrap();
        let expected: Vec<usize> = [1, 2, 7, 10, 8, 9, 6, 5, 4, 3].iter().map(|v| v - 1).collect();
        assert_eq!(leaf.images(), expected.as_slice());
        assert!(part("[1 2 | 3]").as_permutation().is_err());
    }

    #[test]
    fn cell_index_is_one_based() {
        let pi = part("[2 3 | 1]");
        assert_eq!(pi.cell_index(1), 1);
        assert_eq!(pi.cell_index(0), 2);
    }

    fn arb_partition(n: usize) -> impl Strategy<Value = OrderedPartition> {
        (
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            proptest::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(order, cuts)| {
                let mut cells: Vec<Vec<usize>> = vec![Vec::new()];
                for (i, v) in order.into_iter().enumerate() {
                    if i > 0 && cuts[i] {
                        cells.push(Vec::new());
                    }
                    cells.last_mut().unwrap().push(v);
                }
                OrderedPartition::from_cells(&cells).unwrap()
            })
    }

    proptest! {
        #[test]
        fn individualize_refines_by_one_split(pi in arb_partition(8), pick in 0usize..8) {
            let candidates: Vec<usize> = (0..8).filter(|&v| pi.cell_len(pi.cell_start(v)) > 1).collect();
            prop_assume!(!candidates.is_empty());
            let v = candidates[pick % candidates.len()];
            let mut child = pi.clone();
            child.individualize(v).unwrap();
            prop_assert!(child.is_finer_or_equal(&pi));
            prop_assert!(!pi.is_finer_or_equal(&child));
            prop_assert_eq!(child.num_cells(), pi.num_cells() + 1);
            prop_assert_eq!(child.cell_len(child.cell_start(v)), 1);
        }

        #[test]
        fn permutation_roundtrip(order in Just((0..7).collect::<Vec<_>>()).prop_shuffle()) {
            let cells: Vec<Vec<usize>> = order.iter().map(|&v| vec![v]).collect();
            let p = OrderedPartition::from_cells(&cells).unwrap().as_permutation().unwrap();
            prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        }

        #[test]
        fn action_consistency(pi in arb_partition(7),
                              g in Just((0..7).collect::<Vec<_>>()).prop_shuffle()) {
            let gamma = Permutation::from_images(g).unwrap();
            let img = pi.permuted(&gamma);
            for v in 0..7 {
                prop_assert_eq!(img.cell_index(gamma.image(v)), pi.cell_index(v));
            }
        }
    }
}
