//! Convex characters of a single tree.
//!
//! A partition is convex on `T` when the Steiner subtrees of its blocks are
//! pairwise vertex-disjoint. The union of those Steiner subtrees is an edge
//! set `E'` in which every internal vertex has degree 0, 2 or 3, and every
//! such edge set arises from exactly one convex partition. Both the
//! enumerator and the counting recurrence work over these edge sets.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::caterpillar::Caterpillar;
use crate::error::{guard, Error, Result};
use crate::partition::{Partition, PartitionStats};
use crate::tree::Tree;

const NONE: usize = usize::MAX;

pub(crate) fn check_sizes(tree_n: usize, p: &Partition) -> Result<()> {
    if tree_n != p.n() {
        return Err(Error::LabelMismatch(format!(
            "partition of [{}] on a tree with {} leaves",
            p.n(),
            tree_n
        )));
    }
    Ok(())
}

/// Steiner-disjointness of the blocks of `p` on `tree`. Partition element
/// `i` refers to the leaf of rank `i` (the label `i` on standard trees).
pub fn is_convex(tree: &Tree, p: &Partition) -> Result<bool> {
    check_sizes(tree.n(), p)?;
    Ok(steiner_disjoint(tree, p.rgs(), &p.block_sizes()))
}

/// Bottom-up check: every edge may be crossed by at most one block. In a
/// binary tree two Steiner subtrees that share a vertex also share an edge.
pub(crate) fn steiner_disjoint(tree: &Tree, rgs: &[u32], sizes: &[usize]) -> bool {
    let n = tree.n();
    let nv = tree.num_vertices();
    let mut open_block = vec![NONE; nv];
    let mut open_count = vec![0usize; nv];
    for &v in tree.postorder() {
        let (mut block, mut count) = if v < n { (rgs[v] as usize, 1) } else { (NONE, 0) };
        for &w in tree.neighbors(v) {
            if Some(w) == tree.parent(v) || open_block[w] == NONE {
                continue;
            }
            if block == NONE {
                block = open_block[w];
                count = open_count[w];
            } else if block == open_block[w] {
                count += open_count[w];
            } else {
                return false;
            }
        }
        if block != NONE && count < sizes[block] {
            open_block[v] = block;
            open_count[v] = count;
        }
    }
    true
}

/// Fast path on `T_pi`: the position spans of the blocks of size at least
/// two must be disjoint, i.e. each such block is contiguous once the
/// singletons are skipped.
pub fn is_convex_caterpillar(perm: &Caterpillar, p: &Partition) -> Result<bool> {
    check_sizes(perm.n(), p)?;
    let sizes = p.block_sizes();
    Ok(spans_disjoint(perm.perm(), p.rgs(), &sizes))
}

pub(crate) fn spans_disjoint(order: &[crate::Label], rgs: &[u32], sizes: &[usize]) -> bool {
    let mut closed = vec![false; sizes.len()];
    let mut current = NONE;
    for &label in order {
        let b = rgs[label as usize - 1] as usize;
        if sizes[b] < 2 || b == current {
            continue;
        }
        if closed[b] {
            return false;
        }
        if current != NONE {
            closed[current] = true;
        }
        current = b;
    }
    true
}

/// The partition induced by deleting `removed` edges (indices into
/// `tree.edges()`): leaves in the same component share a block.
pub fn induced_partition(tree: &Tree, removed: &[bool]) -> Partition {
    let edges = tree.edges();
    let mut dsu = Dsu::new(tree.num_vertices());
    for (e, &(a, b)) in edges.iter().enumerate() {
        if !removed[e] {
            dsu.union(a, b);
        }
    }
    let ids: Vec<usize> = (0..tree.n()).map(|v| dsu.find(v)).collect();
    let mut scratch = Vec::new();
    Partition::from_dense_assignment(&ids, tree.num_vertices(), &mut scratch)
}

/// Every partition induced by some edge subset, by brute force over all
/// `2^(2n-3)` subsets.
pub fn convex_oracle(tree: &Tree, max_n: usize) -> Result<BTreeSet<Partition>> {
    guard("edge-subset oracle", tree.n(), max_n)?;
    let m = tree.edges().len();
    let mut out = BTreeSet::new();
    let mut removed = vec![false; m];
    for mask in 0u64..(1u64 << m) {
        for (e, r) in removed.iter_mut().enumerate() {
            *r = mask >> e & 1 == 1;
        }
        out.insert(induced_partition(tree, &removed));
    }
    Ok(out)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Streams the convex characters of a tree, each exactly once.
///
/// One slot per non-root vertex says whether the edge to its parent lies in
/// `E'`. Slots are in postorder, so the admissible values of a slot depend
/// only on earlier slots and an odometer walks all valid assignments with no
/// dead ends.
#[derive(Clone, Debug)]
pub struct ConvexEnumerator {
    n: usize,
    num_vertices: usize,
    slot_vertex: Vec<usize>,
    parent_slot: Vec<usize>,
    // slots of the children of each slot's vertex
    children: Vec<[usize; 2]>,
    choice: Vec<u8>,
    frozen: usize,
    done: bool,
    comp: Vec<usize>,
    scratch: Vec<u32>,
}

impl ConvexEnumerator {
    fn build(tree: &Tree) -> Self {
        let n = tree.n();
        let nv = tree.num_vertices();
        let slot_vertex: Vec<usize> = tree.postorder().iter().copied().filter(|&v| tree.parent(v).is_some()).collect();
        let mut slot_of = vec![NONE; nv];
        for (i, &v) in slot_vertex.iter().enumerate() {
            slot_of[v] = i;
        }
        let parent_slot = slot_vertex.iter().map(|&v| slot_of[tree.parent(v).unwrap()]).collect();
        let children = slot_vertex
            .iter()
            .map(|&v| {
                let mut c = [NONE; 2];
                for (j, &w) in tree.neighbors(v).iter().filter(|&&w| Some(w) != tree.parent(v)).enumerate() {
                    c[j] = slot_of[w];
                }
                c
            })
            .collect();
        let mut e = ConvexEnumerator {
            n,
            num_vertices: nv,
            slot_vertex,
            parent_slot,
            children,
            choice: Vec::new(),
            frozen: 0,
            done: false,
            comp: vec![0; nv],
            scratch: Vec::new(),
        };
        e.choice = vec![0; e.slot_vertex.len()];
        e.reset_from(0);
        e
    }

    fn joined_children(&self, i: usize) -> usize {
        self.children[i]
            .iter()
            .filter(|&&c| c != NONE && self.choice[c] == 1)
            .count()
    }

    fn is_leaf_slot(&self, i: usize) -> bool {
        self.slot_vertex[i] < self.n
    }

    fn min_choice(&self, i: usize) -> u8 {
        u8::from(!self.is_leaf_slot(i) && self.joined_children(i) == 1)
    }

    fn can_increase(&self, i: usize) -> bool {
        self.choice[i] == 0 && (self.is_leaf_slot(i) || self.joined_children(i) == 2)
    }

    fn reset_from(&mut self, start: usize) {
        for i in start..self.choice.len() {
            self.choice[i] = self.min_choice(i);
        }
    }

    /// Advances the slots in `[lo, hi)`; false when exhausted.
    fn advance(&mut self, lo: usize, hi: usize) -> bool {
        for i in (lo..hi).rev() {
            if self.can_increase(i) {
                self.choice[i] = 1;
                for j in i + 1..hi {
                    self.choice[j] = self.min_choice(j);
                }
                return true;
            }
        }
        false
    }

    fn current(&mut self) -> Partition {
        // slots in reverse are a preorder; the root leaf (vertex 0) is component 0
        self.comp[0] = 0;
        let mut next = 1;
        for i in (0..self.slot_vertex.len()).rev() {
            let v = self.slot_vertex[i];
            let p = self.parent_slot[i];
            let parent_vertex = if p == NONE { 0 } else { self.slot_vertex[p] };
            self.comp[v] = if self.choice[i] == 1 {
                self.comp[parent_vertex]
            } else {
                next += 1;
                next - 1
            };
        }
        let ids = &self.comp[..self.n];
        Partition::from_dense_assignment(ids, self.num_vertices, &mut self.scratch)
    }

    /// Splits the remaining stream into independent chunks by fixing the
    /// first `depth` slots. The union of the chunks is the full stream.
    pub fn split(&self, depth: usize) -> Vec<ConvexEnumerator> {
        let depth = depth.min(self.choice.len()).max(self.frozen);
        let mut prefix = self.clone();
        prefix.reset_from(self.frozen);
        let mut chunks = Vec::new();
        loop {
            let mut chunk = prefix.clone();
            chunk.frozen = depth;
            chunk.reset_from(depth);
            chunks.push(chunk);
            if !prefix.advance(self.frozen, depth) {
                break;
            }
        }
        chunks
    }

    /// Number of leaves of the underlying tree.
    pub fn n(&self) -> usize {
        self.n
    }
}

impl Iterator for ConvexEnumerator {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let out = self.current();
        let len = self.choice.len();
        if !self.advance(self.frozen, len) {
            self.done = true;
        }
        Some(out)
    }
}

/// Streams `P(T)`; refuses trees above `max_n` leaves.
pub fn enumerate_convex(tree: &Tree, max_n: usize) -> Result<ConvexEnumerator> {
    guard("convex enumeration", tree.n(), max_n)?;
    Ok(ConvexEnumerator::build(tree))
}

/// Exact counts of characters indexed by number of blocks `k` and number of
/// singletons `ell`. A cell is nontrivial when `k - ell >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    n: usize,
    // cells[k][ell]
    cells: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn new(n: usize) -> Self {
        CountTable {
            n,
            cells: vec![vec![BigUint::zero(); n + 1]; n + 1],
        }
    }

    /// Tallies the stats of a stream of partitions of `[n]`.
    pub fn tally<I: IntoIterator<Item = PartitionStats>>(n: usize, stats: I) -> Self {
        let mut grid = vec![0u64; (n + 1) * (n + 1)];
        for st in stats {
            grid[st.k * (n + 1) + st.ell] += 1;
        }
        let mut table = CountTable::new(n);
        for k in 0..=n {
            for ell in 0..=n {
                table.cells[k][ell] = BigUint::from(grid[k * (n + 1) + ell]);
            }
        }
        table
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, ell: usize) -> &BigUint {
        &self.cells[k][ell]
    }

    pub fn add(&mut self, k: usize, ell: usize, count: &BigUint) {
        self.cells[k][ell] += count;
    }

    /// Adds another table cell by cell.
    pub fn merge(&mut self, other: &CountTable) {
        assert_eq!(self.n, other.n, "merging count tables of different sizes");
        for (row, other_row) in self.cells.iter_mut().zip(&other.cells) {
            for (a, b) in row.iter_mut().zip(other_row) {
                *a += b;
            }
        }
    }

    pub fn by_k(&self, k: usize) -> BigUint {
        self.cells.get(k).map_or_else(BigUint::zero, |row| row.iter().sum())
    }

    /// Characters with `k` blocks and at least two blocks of size two or more.
    pub fn by_k_nontrivial(&self, k: usize) -> BigUint {
        match self.cells.get(k) {
            Some(row) => row.iter().take(k.saturating_sub(1)).sum(),
            None => BigUint::zero(),
        }
    }

    /// Characters with `k` blocks and no singleton block.
    pub fn by_k_singleton_free(&self, k: usize) -> BigUint {
        self.cells.get(k).map_or_else(BigUint::zero, |row| row[0].clone())
    }

    pub fn total(&self) -> BigUint {
        self.cells.iter().flatten().sum()
    }

    pub fn total_nontrivial(&self) -> BigUint {
        (0..=self.n).map(|k| self.by_k_nontrivial(k)).sum()
    }

    /// Nonzero cells as `(k, ell, nontrivial, count)`, ordered by `k` then `ell`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, bool, &BigUint)> + '_ {
        self.cells.iter().enumerate().flat_map(|(k, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(ell, c)| (k, ell, k >= ell + 2, c))
        })
    }
}

/// Bivariate polynomial in (blocks, singletons).
#[derive(Clone, Debug)]
struct Poly {
    kdim: usize,
    ldim: usize,
    coef: Vec<BigUint>,
}

impl Poly {
    fn monomial(k: usize, ell: usize) -> Poly {
        let mut p = Poly {
            kdim: k + 1,
            ldim: ell + 1,
            coef: vec![BigUint::zero(); (k + 1) * (ell + 1)],
        };
        p.coef[k * (ell + 1) + ell] = BigUint::from(1u32);
        p
    }

    fn mul(&self, other: &Poly) -> Poly {
        let kdim = self.kdim + other.kdim - 1;
        let ldim = self.ldim + other.ldim - 1;
        let mut coef = vec![BigUint::zero(); kdim * ldim];
        for (i, a) in self.coef.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let (ka, la) = (i / self.ldim, i % self.ldim);
            for (j, b) in other.coef.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let (kb, lb) = (j / other.ldim, j % other.ldim);
                coef[(ka + kb) * ldim + la + lb] += a * b;
            }
        }
        Poly { kdim, ldim, coef }
    }

    fn add(&self, other: &Poly) -> Poly {
        let kdim = self.kdim.max(other.kdim);
        let ldim = self.ldim.max(other.ldim);
        let mut coef = vec![BigUint::zero(); kdim * ldim];
        for p in [self, other] {
            for (i, c) in p.coef.iter().enumerate() {
                coef[(i / p.ldim) * ldim + i % p.ldim] += c;
            }
        }
        Poly { kdim, ldim, coef }
    }
}

/// Counts `P(T)` by blocks and singletons with a recurrence over the tree
/// rooted at a leaf, never enumerating. Polynomial in `n`.
///
/// For each non-root vertex two generating polynomials are kept: `open`
/// (its parent edge is in `E'`, so its component is still growing) and
/// `closed` (parent edge not in `E'`; finished components are counted).
pub fn count_convex(tree: &Tree) -> CountTable {
    let n = tree.n();
    let one = Poly::monomial(0, 0);
    let block = Poly::monomial(1, 0);
    let singleton = Poly::monomial(1, 1);
    let nv = tree.num_vertices();
    let mut open: Vec<Option<Poly>> = vec![None; nv];
    let mut closed: Vec<Option<Poly>> = vec![None; nv];
    let mut total = singleton.clone();
    for &v in tree.postorder() {
        let kids: Vec<usize> = tree
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| Some(w) != tree.parent(v))
            .collect();
        if tree.parent(v).is_none() {
            // the root leaf: alone, or joined to its child's open component
            if let Some(&c) = kids.first() {
                let (oc, cc) = (open[c].take().unwrap(), closed[c].take().unwrap());
                total = singleton.mul(&cc).add(&block.mul(&oc));
            }
            continue;
        }
        if v < n {
            open[v] = Some(one.clone());
            closed[v] = Some(singleton.clone());
            continue;
        }
        let (a, b) = (kids[0], kids[1]);
        let (oa, ca) = (open[a].take().unwrap(), closed[a].take().unwrap());
        let (ob, cb) = (open[b].take().unwrap(), closed[b].take().unwrap());
        let both_open = oa.mul(&ob);
        closed[v] = Some(ca.mul(&cb).add(&block.mul(&both_open)));
        open[v] = Some(oa.mul(&cb).add(&ca.mul(&ob)).add(&both_open));
    }
    let mut table = CountTable::new(n);
    for (i, c) in total.coef.iter().enumerate() {
        let (k, ell) = (i / total.ldim, i % total.ldim);
        if !c.is_zero() {
            table.add(k, ell, c);
        }
    }
    table
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::combinatorics::{binomial, fibonacci};
    use crate::partition::enumerate_all_partitions;
    use crate::rng::seeded;
    use crate::Label;
    use alloc::string::ToString;
    use rand::Rng;

    pub(crate) fn fig1_left() -> Tree {
        Caterpillar::identity(7).to_tree()
    }

    pub(crate) fn fig1_right() -> Tree {
        let labels: Vec<Label> = (1..=7).collect();
        let edges = [
            (0, 7),
            (1, 7),
            (7, 8),
            (8, 9),
            (9, 5),
            (9, 6),
            (8, 10),
            (10, 2),
            (10, 11),
            (11, 3),
            (11, 4),
        ];
        Tree::from_edges(&labels, 12, &edges).unwrap()
    }

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn figure_one_membership() {
        let fig = p("1,2,3|4,5|6,7");
        assert!(is_convex(&fig1_left(), &fig).unwrap());
        assert!(is_convex(&fig1_right(), &fig).unwrap());
        let split = p("1,2,3,4|5,6,7");
        assert!(is_convex(&fig1_left(), &split).unwrap());
        assert!(!is_convex(&fig1_right(), &split).unwrap());
        assert!(matches!(is_convex(&fig1_left(), &p("1,2|3")), Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn caterpillar_fast_path_examples() {
        let id = Caterpillar::identity(7);
        assert!(is_convex_caterpillar(&id, &p("1,3|2|4,5|6|7")).unwrap());
        assert!(!is_convex_caterpillar(&id, &p("1,5|2,3|4|6|7")).unwrap());
        assert!(is_convex_caterpillar(&id, &Partition::discrete(7)).unwrap());
        // cross-check the same examples on the tree
        assert!(is_convex(&id.to_tree(), &p("1,3|2|4,5|6|7")).unwrap());
        assert!(!is_convex(&id.to_tree(), &p("1,5|2,3|4|6|7")).unwrap());
    }

    #[test]
    fn trivial_characters_are_convex_on_random_trees() {
        let mut rng = seeded(3);
        for _ in 0..50 {
            let n = rng.random_range(2..=20);
            let t = Tree::random(n, &mut rng).unwrap();
            let mut ids: Vec<usize> = (0..n).collect();
            let big = rng.random_range(0..n);
            for (i, id) in ids.iter_mut().enumerate() {
                if rng.random_bool(0.5) {
                    *id = big;
                }
                let _ = i;
            }
            let part = Partition::from_assignment(&ids);
            assert!(part.stats().s <= 1);
            assert!(is_convex(&t, &part).unwrap());
        }
    }

    #[test]
    fn oracle_small_cases() {
        let t4 = Caterpillar::identity(4).to_tree();
        let oracle = convex_oracle(&t4, 12).unwrap();
        assert_eq!(oracle.len(), 13);
        let missing: Vec<_> = enumerate_all_partitions(4, 12)
            .unwrap()
            .filter(|q| !oracle.contains(q))
            .map(|q| q.to_string())
            .collect();
        assert_eq!(missing, vec!["1,3|2,4", "1,4|2,3"]);
        assert_eq!(convex_oracle(&Tree::small(2).unwrap(), 12).unwrap().len(), 2);
        assert!(convex_oracle(&Caterpillar::identity(13).to_tree(), 12).is_err());
    }

    #[test]
    fn membership_equals_edge_removal_inducibility() {
        let mut trees: Vec<Tree> = (1..=6).map(|n| Caterpillar::identity(n).to_tree()).collect();
        trees.push(fig1_right());
        let mut rng = seeded(19);
        trees.extend((0..4).map(|_| Tree::random(7, &mut rng).unwrap()));
        for t in &trees {
            let oracle = convex_oracle(t, 12).unwrap();
            for q in enumerate_all_partitions(t.n(), 12).unwrap() {
                assert_eq!(is_convex(t, &q).unwrap(), oracle.contains(&q), "{q}");
            }
        }
    }

    #[test]
    fn caterpillar_fast_path_agrees_exhaustively() {
        for n in 1..=7 {
            let parts: Vec<_> = enumerate_all_partitions(n, 12).unwrap().collect();
            for c in crate::caterpillar::enumerate_canonical(n, 11).unwrap() {
                // also a non-canonical member of the orbit
                let variants = [c.clone(), c.reversed()];
                let tree = c.to_tree();
                for q in &parts {
                    let slow = is_convex(&tree, q).unwrap();
                    for v in &variants {
                        assert_eq!(is_convex_caterpillar(v, q).unwrap(), slow, "{v} {q}");
                    }
                }
            }
        }
    }

    #[test]
    fn enumerator_matches_oracle() {
        let mut rng = seeded(23);
        for n in 1..=8 {
            for _ in 0..3 {
                let t = Tree::random(n, &mut rng).unwrap();
                let listed: Vec<_> = enumerate_convex(&t, 18).unwrap().collect();
                let set: BTreeSet<_> = listed.iter().cloned().collect();
                assert_eq!(set.len(), listed.len(), "duplicates for n = {n}");
                assert_eq!(set, convex_oracle(&t, 12).unwrap());
            }
        }
    }

    #[test]
    fn enumerator_filtered_example() {
        let t = Caterpillar::identity(7).to_tree();
        let mut got: Vec<_> = enumerate_convex(&t, 18)
            .unwrap()
            .filter(|q| {
                let s = q.stats();
                s.k == 2 && s.s >= 2
            })
            .map(|q| q.to_string())
            .collect();
        got.sort();
        assert_eq!(got, vec!["1,2,3,4,5|6,7", "1,2,3,4|5,6,7", "1,2,3|4,5,6,7", "1,2|3,4,5,6,7"]);
        let discrete: Vec<_> = enumerate_convex(&t, 18).unwrap().filter(|q| q.num_blocks() == 7).collect();
        assert_eq!(discrete, vec![Partition::discrete(7)]);
    }

    #[test]
    fn split_chunks_cover_the_stream() {
        let mut rng = seeded(29);
        let t = Tree::random(9, &mut rng).unwrap();
        let whole: BTreeSet<_> = enumerate_convex(&t, 18).unwrap().collect();
        for depth in [0, 1, 3, 6, 15] {
            let mut union = BTreeSet::new();
            let mut count = 0;
            for chunk in enumerate_convex(&t, 18).unwrap().split(depth) {
                for q in chunk {
                    count += 1;
                    union.insert(q);
                }
            }
            assert_eq!(count, whole.len());
            assert_eq!(union, whole);
        }
    }

    #[test]
    fn counting_examples() {
        let t = Caterpillar::identity(7).to_tree();
        let table = count_convex(&t);
        assert_eq!(table.total(), BigUint::from(233u32));
        assert_eq!(table.by_k(3), BigUint::from(45u32));
        assert_eq!(table.by_k_nontrivial(2), BigUint::from(4u32));
        assert_eq!(count_convex(&Tree::small(1).unwrap()).total(), BigUint::from(1u32));
        assert_eq!(count_convex(&Tree::small(2).unwrap()).total(), BigUint::from(2u32));
    }

    #[test]
    fn counting_matches_enumeration_cellwise() {
        let mut rng = seeded(31);
        for n in 1..=12 {
            let t = Tree::random(n, &mut rng).unwrap();
            let dp = count_convex(&t);
            let listed = CountTable::tally(n, enumerate_convex(&t, 18).unwrap().map(|q| q.stats()));
            assert_eq!(dp, listed, "n = {n}");
        }
    }

    #[test]
    fn counting_identities_on_large_trees() {
        let mut rng = seeded(37);
        for n in [20usize, 45, 80, 150] {
            let t = Tree::random(n, &mut rng).unwrap();
            let table = count_convex(&t);
            assert_eq!(table.total(), fibonacci(2 * n - 1));
            for k in 1..=n {
                assert_eq!(table.by_k(k), binomial(2 * n - k - 1, k - 1), "n = {n}, k = {k}");
                let free = if n > k { binomial(n - k - 1, k - 1) } else { BigUint::zero() };
                assert_eq!(table.by_k_singleton_free(k), free, "n = {n}, k = {k}");
            }
        }
        let cat = count_convex(&Caterpillar::identity(300).to_tree());
        assert_eq!(cat.total(), fibonacci(599));
    }

    #[test]
    fn shape_independence() {
        let mut rng = seeded(41);
        for n in 4..=14 {
            let reference = count_convex(&Caterpillar::identity(n).to_tree());
            for _ in 0..3 {
                assert_eq!(count_convex(&Tree::random(n, &mut rng).unwrap()), reference);
            }
        }
    }

    #[test]
    fn table_accessors() {
        let mut table = CountTable::tally(4, [p("1,2|3,4").stats(), p("1|2|3,4").stats()]);
        assert_eq!(table.by_k_nontrivial(2), BigUint::from(1u32));
        assert_eq!(table.by_k_nontrivial(3), BigUint::zero());
        assert_eq!(table.by_k(3), BigUint::from(1u32));
        assert_eq!(table.rows().count(), 2);
        let copy = table.clone();
        table.merge(&copy);
        assert_eq!(table.total(), BigUint::from(4u32));
        assert_eq!(table.total_nontrivial(), BigUint::from(2u32));
    }
}
