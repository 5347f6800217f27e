//! Caterpillars as permutations of `[n]`.
//!
//! `T_pi` hangs leaves `pi(1), ..., pi(n)` left to right below a backbone
//! path. Swapping the first two entries, swapping the last two, or reversing
//! gives the same labeled tree; the canonical representative is the
//! lexicographically least member of that orbit.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{guard, Error, Result};
use crate::tree::Tree;
use crate::Label;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Caterpillar {
    perm: Vec<Label>,
}

impl Caterpillar {
    pub fn new(perm: Vec<Label>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &x in &perm {
            let i = x as usize;
            if i == 0 || i > n {
                return Err(Error::InvalidPermutation(format!("entry {x} outside [1, {n}]")));
            }
            if seen[i - 1] {
                return Err(Error::InvalidPermutation(format!("entry {x} repeated")));
            }
            seen[i - 1] = true;
        }
        Ok(Caterpillar { perm })
    }

    pub fn identity(n: usize) -> Self {
        Caterpillar {
            perm: (1..=n as Label).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// Leaf labels left to right.
    pub fn perm(&self) -> &[Label] {
        &self.perm
    }

    /// `positions()[label - 1]` is the 0-based position of `label`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.n()];
        for (i, &x) in self.perm.iter().enumerate() {
            pos[x as usize - 1] = i;
        }
        pos
    }

    pub fn inverse(&self) -> Caterpillar {
        Caterpillar {
            perm: self.positions().into_iter().map(|p| p as Label + 1).collect(),
        }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Caterpillar) -> Caterpillar {
        Caterpillar {
            perm: other.perm.iter().map(|&x| self.perm[x as usize - 1]).collect(),
        }
    }

    /// The reversed leaf order.
    pub fn reversed(&self) -> Caterpillar {
        let mut perm = self.perm.clone();
        perm.reverse();
        Caterpillar { perm }
    }

    /// Every permutation describing the same labeled caterpillar.
    pub fn orbit(&self) -> BTreeSet<Vec<Label>> {
        let n = self.n();
        let mut orbit = BTreeSet::new();
        let mut frontier = vec![self.perm.clone()];
        orbit.insert(self.perm.clone());
        while let Some(p) = frontier.pop() {
            let mut images = Vec::with_capacity(3);
            if n >= 2 {
                let mut a = p.clone();
                a.swap(0, 1);
                images.push(a);
                let mut b = p.clone();
                b.swap(n - 2, n - 1);
                images.push(b);
            }
            let mut r = p.clone();
            r.reverse();
            images.push(r);
            for q in images {
                if orbit.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
        orbit
    }

    /// Lexicographically least member of the symmetry orbit.
    pub fn canonical(&self) -> Caterpillar {
        Caterpillar {
            perm: self.orbit().into_iter().next().unwrap(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        let p = &self.perm;
        let n = p.len();
        if n < 4 {
            return p.windows(2).all(|w| w[0] < w[1]);
        }
        p[0] < p[1] && p[n - 2] < p[n - 1] && p[0] < p[n - 2]
    }

    /// The tree `T_pi`.
    pub fn to_tree(&self) -> Tree {
        let n = self.n();
        if n <= 3 {
            return Tree::small(n.max(1)).expect("small tree").relabeled(|l| self.perm[l as usize - 1]).unwrap();
        }
        // leaves 0..n (vertex i has label i + 1); backbone n..2n-2
        let backbone = |pos: usize| n + pos.saturating_sub(1).min(n - 3);
        let mut edges: Vec<(usize, usize)> = (0..n - 3).map(|j| (n + j, n + j + 1)).collect();
        for (pos, &label) in self.perm.iter().enumerate() {
            edges.push((label as usize - 1, backbone(pos)));
        }
        let labels: Vec<Label> = (1..=n as Label).collect();
        Tree::from_edges(&labels, 2 * n - 2, &edges).expect("caterpillar is a valid tree")
    }

    /// Uniform random permutation of `[n]`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut perm: Vec<Label> = (1..=n as Label).collect();
        perm.shuffle(rng);
        Caterpillar { perm }
    }
}

impl fmt::Display for Caterpillar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.perm.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Caterpillar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Caterpillar({self})")
    }
}

/// Rearranges `p` into the next permutation in lexicographic order;
/// returns false after the last one.
pub(crate) fn next_permutation(p: &mut [Label]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Canonical caterpillars on `[n]` in lexicographic order.
#[derive(Clone, Debug)]
pub struct CanonicalCaterpillars {
    current: Vec<Label>,
    fixed: usize,
    done: bool,
}

impl Iterator for CanonicalCaterpillars {
    type Item = Caterpillar;

    fn next(&mut self) -> Option<Caterpillar> {
        while !self.done {
            let candidate = Caterpillar {
                perm: self.current.clone(),
            };
            self.done = !next_permutation(&mut self.current[self.fixed..]);
            if candidate.is_canonical() {
                return Some(candidate);
            }
        }
        None
    }
}

/// Streams each caterpillar on `[n]` once, as its canonical permutation.
pub fn enumerate_canonical(n: usize, max_n: usize) -> Result<CanonicalCaterpillars> {
    guard("caterpillar enumeration", n, max_n)?;
    Ok(CanonicalCaterpillars {
        current: (1..=n as Label).collect(),
        fixed: 0,
        done: false,
    })
}

/// Prefixes splitting the canonical caterpillars on `[n]` into chunks: the
/// ordered pairs `a < b` for `n >= 4`. Concatenating the chunks in this
/// order reproduces the order of [`enumerate_canonical`].
pub fn canonical_prefixes(n: usize) -> Vec<Vec<Label>> {
    if n < 4 {
        return vec![(1..=n as Label).collect()];
    }
    let n = n as Label;
    (1..=n).flat_map(|a| (a + 1..=n).map(move |b| vec![a, b])).collect()
}

/// Canonical caterpillars whose permutation starts with `prefix`.
pub fn canonical_with_prefix(n: usize, prefix: &[Label], max_n: usize) -> Result<CanonicalCaterpillars> {
    guard("caterpillar enumeration", n, max_n)?;
    let mut current = prefix.to_vec();
    current.extend((1..=n as Label).filter(|x| !prefix.contains(x)));
    Caterpillar::new(current.clone())?;
    Ok(CanonicalCaterpillars {
        current,
        fixed: prefix.len(),
        done: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;

    fn cat(p: &[Label]) -> Caterpillar {
        Caterpillar::new(p.to_vec()).unwrap()
    }

    #[test]
    fn prefix_chunks_concatenate_to_the_full_stream() {
        for n in 1..=8 {
            let whole: Vec<_> = enumerate_canonical(n, 11).unwrap().collect();
            let chunked: Vec<_> = canonical_prefixes(n)
                .iter()
                .flat_map(|p| canonical_with_prefix(n, p, 11).unwrap())
                .collect();
            assert_eq!(chunked, whole, "n = {n}");
        }
        assert!(canonical_with_prefix(5, &[1, 1], 11).is_err());
    }

    #[test]
    fn validation() {
        assert!(Caterpillar::new(vec![1, 1, 2]).is_err());
        assert!(Caterpillar::new(vec![0, 1, 2]).is_err());
        assert!(Caterpillar::new(vec![1, 4, 2]).is_err());
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(cat(&[4, 3, 2, 1]).canonical(), cat(&[1, 2, 3, 4]));
        assert_eq!(cat(&[1, 2, 3, 4]).canonical(), cat(&[1, 2, 3, 4]));
        // orbit of (3,1,4,2,5), enumerated by hand:
        // (3,1,4,2,5) (1,3,4,2,5) (3,1,4,5,2) (1,3,4,5,2)
        // (5,2,4,1,3) (2,5,4,1,3) (5,2,4,3,1) (2,5,4,3,1)
        assert_eq!(cat(&[3, 1, 4, 2, 5]).orbit().len(), 8);
        assert_eq!(cat(&[3, 1, 4, 2, 5]).canonical(), cat(&[1, 3, 4, 2, 5]));
    }

    #[test]
    fn symmetric_permutations_give_isomorphic_trees() {
        assert!(cat(&[4, 3, 2, 1]).to_tree().is_isomorphic(&cat(&[1, 2, 3, 4]).to_tree()));
        assert!(cat(&[2, 1, 3, 4, 5]).to_tree().is_isomorphic(&cat(&[1, 2, 3, 4, 5]).to_tree()));
        assert!(!cat(&[1, 3, 2, 4, 5]).to_tree().is_isomorphic(&cat(&[1, 2, 3, 4, 5]).to_tree()));
    }

    #[test]
    fn canonical_enumeration_counts() {
        let counts: Vec<usize> = (1..=8).map(|n| enumerate_canonical(n, 11).unwrap().count()).collect();
        assert_eq!(counts, vec![1, 1, 1, 3, 15, 90, 630, 5040]);
        assert!(enumerate_canonical(12, 11).is_err());
    }

    #[test]
    fn fast_canonical_test_matches_orbit_minimum() {
        for n in 1..=7 {
            let mut p: Vec<Label> = (1..=n as Label).collect();
            loop {
                let c = cat(&p);
                assert_eq!(c.is_canonical(), c.canonical() == c, "{c}");
                if !next_permutation(&mut p) {
                    break;
                }
            }
        }
    }

    #[test]
    fn tree_round_trip_is_canonicalization() {
        for n in 1..=7 {
            let mut p: Vec<Label> = (1..=n as Label).collect();
            loop {
                let c = cat(&p);
                assert_eq!(c.to_tree().as_caterpillar().unwrap(), c.canonical());
                if !next_permutation(&mut p) {
                    break;
                }
            }
        }
    }

    #[test]
    fn distinct_canonical_forms_give_distinct_trees() {
        let cats: Vec<_> = enumerate_canonical(6, 11).unwrap().collect();
        let trees: Vec<_> = cats.iter().map(|c| c.to_tree()).collect();
        for i in 0..trees.len() {
            for j in i + 1..trees.len() {
                assert!(!trees[i].is_isomorphic(&trees[j]));
            }
        }
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let a: Vec<_> = {
            let mut rng = seeded(5);
            (0..10).map(|_| Caterpillar::random(9, &mut rng)).collect()
        };
        let b: Vec<_> = {
            let mut rng = seeded(5);
            (0..10).map(|_| Caterpillar::random(9, &mut rng)).collect()
        };
        assert_eq!(a, b);
        assert_eq!(cat(&[2, 3, 1]).inverse(), cat(&[3, 1, 2]));
        assert_eq!(cat(&[2, 3, 1]).compose(&cat(&[2, 3, 1]).inverse()), Caterpillar::identity(3));
    }

    proptest! {
        #[test]
        fn canonical_is_idempotent(seed in any::<u64>(), n in 1usize..14) {
            let mut rng = seeded(seed);
            let c = Caterpillar::random(n, &mut rng);
            let canon = c.canonical();
            prop_assert!(canon.is_canonical());
            prop_assert_eq!(canon.canonical(), canon.clone());
            prop_assert!(canon.to_tree().is_isomorphic(&c.to_tree()));
        }
    }
}
