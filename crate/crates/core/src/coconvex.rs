//! Characters that are convex on every tree of a collection.

use alloc::format;
use alloc::vec::Vec;

use crate::caterpillar::Caterpillar;
use crate::convexity::{enumerate_convex, spans_disjoint, steiner_disjoint, ConvexEnumerator, CountTable};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::tree::Tree;
use crate::Label;

fn check_leaf_sets(trees: &[Tree]) -> Result<()> {
    let first = trees.first().ok_or(Error::Empty("tree collection"))?;
    for (i, t) in trees.iter().enumerate().skip(1) {
        if t.labels() != first.labels() {
            return Err(Error::LabelMismatch(format!("tree {} has a different leaf set than tree 0", i)));
        }
    }
    Ok(())
}

/// Membership test against a fixed collection, using the caterpillar fast
/// path for every member that is a caterpillar.
#[derive(Clone, Debug)]
pub struct CoconvexTester {
    n: usize,
    caterpillars: Vec<Vec<Label>>,
    others: Vec<Tree>,
}

impl CoconvexTester {
    pub fn new(trees: &[Tree]) -> Result<Self> {
        check_leaf_sets(trees)?;
        let mut caterpillars = Vec::new();
        let mut others = Vec::new();
        for t in trees {
            match t.as_caterpillar() {
                Some(c) => caterpillars.push(c.perm().to_vec()),
                None => others.push(t.clone()),
            }
        }
        Ok(CoconvexTester {
            n: trees[0].n(),
            caterpillars,
            others,
        })
    }

    /// Tester for caterpillars given by permutations of `[n]`.
    pub fn from_caterpillars(perms: &[Caterpillar]) -> Result<Self> {
        let first = perms.first().ok_or(Error::Empty("caterpillar collection"))?;
        if perms.iter().any(|c| c.n() != first.n()) {
            return Err(Error::LabelMismatch("caterpillars of different sizes".into()));
        }
        Ok(CoconvexTester {
            n: first.n(),
            caterpillars: perms.iter().map(|c| c.perm().to_vec()).collect(),
            others: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn test(&self, p: &Partition) -> Result<bool> {
        crate::convexity::check_sizes(self.n, p)?;
        Ok(self.test_unchecked(p, &p.block_sizes()))
    }

    pub(crate) fn test_unchecked(&self, p: &Partition, sizes: &[usize]) -> bool {
        self.caterpillars.iter().all(|c| spans_disjoint(c, p.rgs(), sizes))
            && self.others.iter().all(|t| steiner_disjoint(t, p.rgs(), sizes))
    }
}

/// Whether `p` is convex on every tree of the collection.
pub fn is_coconvex(trees: &[Tree], p: &Partition) -> Result<bool> {
    CoconvexTester::new(trees)?.test(p)
}

/// Streams the common convex characters: `P(T_1)` is enumerated and
/// filtered by the remaining trees.
#[derive(Clone, Debug)]
pub struct CoconvexEnumerator {
    inner: ConvexEnumerator,
    rest: CoconvexTester,
}

impl CoconvexEnumerator {
    /// Independent chunks whose union is the remaining stream.
    pub fn split(&self, depth: usize) -> Vec<CoconvexEnumerator> {
        self.inner
            .split(depth)
            .into_iter()
            .map(|inner| CoconvexEnumerator {
                inner,
                rest: self.rest.clone(),
            })
            .collect()
    }
}

impl Iterator for CoconvexEnumerator {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        let rest = &self.rest;
        self.inner.find(|p| rest.test_unchecked(p, &p.block_sizes()))
    }
}

pub fn enumerate_coconvex(trees: &[Tree], max_n: usize) -> Result<CoconvexEnumerator> {
    check_leaf_sets(trees)?;
    let inner = enumerate_convex(&trees[0], max_n)?;
    let rest = CoconvexTester::new(&trees[1..]).unwrap_or(CoconvexTester {
        n: trees[0].n(),
        caterpillars: Vec::new(),
        others: Vec::new(),
    });
    Ok(CoconvexEnumerator { inner, rest })
}

/// Counts of common convex characters by blocks and singletons.
pub fn coconvex_counts(trees: &[Tree], max_n: usize) -> Result<CountTable> {
    let n = trees.first().ok_or(Error::Empty("tree collection"))?.n();
    Ok(CountTable::tally(n, enumerate_coconvex(trees, max_n)?.map(|p| p.stats())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{binomial, trivial_count};
    use crate::convexity::tests::{fig1_left, fig1_right};
    use crate::convexity::{convex_oracle, count_convex, is_convex};
    use crate::partition::enumerate_all_partitions;
    use crate::rng::seeded;
    use alloc::collections::BTreeSet;
    use alloc::string::{String, ToString};
    use alloc::vec;
    use num_bigint::BigUint;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn cat(perm: &[Label]) -> Tree {
        Caterpillar::new(perm.to_vec()).unwrap().to_tree()
    }

    #[test]
    fn figure_one_pair() {
        let pair = [fig1_left(), fig1_right()];
        assert!(is_coconvex(&pair, &p("1,2,3|4,5|6,7")).unwrap());
        assert!(!is_coconvex(&pair, &p("1,2,3,4|5,6,7")).unwrap());
        assert!(is_coconvex(&pair, &p("1,4,6|2|3|5|7")).unwrap());
        let table = coconvex_counts(&pair, 18).unwrap();
        assert_eq!(table.by_k(1), BigUint::from(1u32));
        assert_eq!(table.by_k(7), BigUint::from(1u32));
    }

    #[test]
    fn errors() {
        assert!(matches!(is_coconvex(&[], &p("1|2")), Err(Error::Empty(_))));
        let mixed = [cat(&[1, 2, 3, 4]), cat(&[1, 2, 3, 4, 5])];
        assert!(matches!(is_coconvex(&mixed, &p("1|2|3|4")), Err(Error::LabelMismatch(_))));
        assert!(enumerate_coconvex(&[cat(&(1..=19).collect::<Vec<_>>())], 18).is_err());
    }

    #[test]
    fn two_caterpillar_example() {
        let pair = [cat(&[1, 2, 3, 4, 5]), cat(&[1, 3, 2, 4, 5])];
        let mut got: Vec<String> = enumerate_coconvex(&pair, 18)
            .unwrap()
            .filter(|q| q.num_blocks() == 2)
            .map(|q| q.to_string())
            .collect();
        got.sort();
        assert_eq!(got, vec!["1,2,3,4|5", "1,2,3,5|4", "1,2,3|4,5", "1,2,4,5|3", "1,3,4,5|2", "1|2,3,4,5"]);
    }

    #[test]
    fn matches_oracle_intersection() {
        let mut rng = seeded(5);
        for n in 3..=7 {
            let trees: Vec<Tree> = (0..3).map(|_| Tree::random(n, &mut rng).unwrap()).collect();
            let mut expected = convex_oracle(&trees[0], 12).unwrap();
            for t in &trees[1..] {
                let other = convex_oracle(t, 12).unwrap();
                expected.retain(|q| other.contains(q));
            }
            let got: BTreeSet<_> = enumerate_coconvex(&trees, 18).unwrap().collect();
            assert_eq!(got, expected);
            for q in enumerate_all_partitions(n, 12).unwrap() {
                assert_eq!(is_coconvex(&trees, &q).unwrap(), expected.contains(&q));
            }
        }
    }

    #[test]
    fn single_tree_and_duplicates_reduce_to_count_convex() {
        let mut rng = seeded(7);
        for n in 2..=10 {
            let t = Tree::random(n, &mut rng).unwrap();
            let expected = count_convex(&t);
            assert_eq!(coconvex_counts(core::slice::from_ref(&t), 18).unwrap(), expected);
            assert_eq!(coconvex_counts(&[t.clone(), t.clone()], 18).unwrap(), expected);
        }
    }

    #[test]
    fn trivial_floor_and_census() {
        let mut rng = seeded(11);
        for _ in 0..20 {
            let n = rng.random_range(4..=10);
            let trees: Vec<Tree> = (0..rng.random_range(2..=4)).map(|_| Tree::random(n, &mut rng).unwrap()).collect();
            let table = coconvex_counts(&trees, 18).unwrap();
            let trivial: BigUint = (1..=n).map(|k| trivial_count(n, k)).sum();
            assert!(table.total() >= BigUint::from((1u64 << n) - n as u64));
            assert_eq!(table.total() - table.total_nontrivial(), trivial);
            for k in 1..n {
                assert!(table.by_k(k) >= binomial(n, k - 1));
            }
            let none = (0..=n).all(|k| table.by_k_nontrivial(k) == BigUint::from(0u32));
            assert_eq!(none, table.total() == BigUint::from((1u64 << n) - n as u64));
        }
    }

    #[test]
    fn relabeling_invariance() {
        let mut rng = seeded(13);
        for _ in 0..15 {
            let n = rng.random_range(4..=10);
            let trees: Vec<Tree> = (0..2).map(|_| Tree::random(n, &mut rng).unwrap()).collect();
            let mut sigma: Vec<Label> = (1..=n as Label).collect();
            sigma.shuffle(&mut rng);
            let moved: Vec<Tree> = trees.iter().map(|t| t.relabeled(|l| sigma[l as usize - 1]).unwrap()).collect();
            assert_eq!(coconvex_counts(&trees, 18).unwrap(), coconvex_counts(&moved, 18).unwrap());
        }
    }

    #[test]
    fn adding_a_tree_never_increases_counts() {
        let mut rng = seeded(17);
        for _ in 0..10 {
            let n = rng.random_range(4..=9);
            let mut trees = vec![Tree::random(n, &mut rng).unwrap()];
            let mut previous = coconvex_counts(&trees, 18).unwrap();
            for _ in 0..3 {
                trees.push(Tree::random(n, &mut rng).unwrap());
                let next = coconvex_counts(&trees, 18).unwrap();
                for k in 0..=n {
                    for ell in 0..=n {
                        assert!(next.get(k, ell) <= previous.get(k, ell));
                    }
                }
                previous = next;
            }
        }
    }

    #[test]
    fn caterpillar_tester_agrees_with_tree_tests() {
        let mut rng = seeded(19);
        for _ in 0..10 {
            let n = rng.random_range(4..=9);
            let perms: Vec<Caterpillar> = (0..3).map(|_| Caterpillar::random(n, &mut rng)).collect();
            let trees: Vec<Tree> = perms.iter().map(|c| c.to_tree()).collect();
            let tester = CoconvexTester::from_caterpillars(&perms).unwrap();
            for q in enumerate_convex(&trees[0], 18).unwrap() {
                let slow = trees.iter().all(|t| is_convex(t, &q).unwrap());
                assert_eq!(tester.test(&q).unwrap(), slow);
            }
        }
    }

    #[test]
    fn split_counts_merge() {
        let mut rng = seeded(23);
        let trees: Vec<Tree> = (0..2).map(|_| Tree::random(10, &mut rng).unwrap()).collect();
        let whole = coconvex_counts(&trees, 18).unwrap();
        let mut merged = CountTable::new(10);
        for chunk in enumerate_coconvex(&trees, 18).unwrap().split(5) {
            merged.merge(&CountTable::tally(10, chunk.map(|q| q.stats())));
        }
        assert_eq!(merged, whole);
    }
}
