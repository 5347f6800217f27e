//! Character-based tree metrics and two classical comparison distances.
//!
//! `d_k(T, F)` is the number of `k`-block characters convex on exactly one
//! of the two trees, and `d` sums it over `2 <= k <= n-2`.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;

use crate::coconvex::coconvex_counts;
use crate::combinatorics::{binomial, fibonacci};
use crate::convexity::CountTable;
use crate::error::{Error, Result};
use crate::tree::Tree;
use crate::Label;

/// All character distances of one pair, from a single shared-count pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceReport {
    pub n: usize,
    /// `(k, shared_k, d_k)` for `2 <= k <= n-2`.
    pub per_k: Vec<(usize, BigUint, BigUint)>,
    pub d_total: BigUint,
    pub rf: usize,
    pub quartet: usize,
}

fn check_pair(t: &Tree, f: &Tree) -> Result<usize> {
    if t.labels() != f.labels() {
        return Err(Error::LabelMismatch("trees have different leaf sets".into()));
    }
    Ok(t.n())
}

fn check_metric_domain(t: &Tree, f: &Tree) -> Result<usize> {
    let n = check_pair(t, f)?;
    if n < 4 {
        return Err(Error::OutOfRange(format!("character distances need n >= 4, got {n}")));
    }
    Ok(n)
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 || k + 2 > n {
        return Err(Error::OutOfRange(format!("k = {k} outside [2, {}]", n - 2)));
    }
    Ok(())
}

fn dk_from_table(n: usize, k: usize, shared: &CountTable) -> (BigUint, BigUint) {
    let s = shared.by_k(k);
    let d = binomial(2 * n - k - 1, k - 1) * 2u32 - &s * 2u32;
    (s, d)
}

/// `d_k(T, F) = 2 C(2n-k-1, k-1) - 2 |P(T) ∩ P(F) ∩ P_{n,k}|`.
pub fn dk_distance(t: &Tree, f: &Tree, k: usize, max_n: usize) -> Result<BigUint> {
    let n = check_metric_domain(t, f)?;
    check_k(n, k)?;
    let shared = coconvex_counts(&[t.clone(), f.clone()], max_n)?;
    Ok(dk_from_table(n, k, &shared).1)
}

/// `|P(T) Δ P(F)|`, from the total shared count.
pub fn character_distance(t: &Tree, f: &Tree, max_n: usize) -> Result<BigUint> {
    check_metric_domain(t, f)?;
    let n = t.n();
    let shared = coconvex_counts(&[t.clone(), f.clone()], max_n)?;
    Ok(fibonacci(2 * n - 1) * 2u32 - shared.total() * 2u32)
}

/// Number of nontrivial splits displayed by exactly one of the trees.
pub fn rf_distance(t: &Tree, f: &Tree) -> Result<usize> {
    check_pair(t, f)?;
    let (a, b) = (t.splits(), f.splits());
    Ok(a.symmetric_difference(&b).count())
}

/// Number of 4-leaf subsets on which the restricted trees differ.
pub fn quartet_distance(t: &Tree, f: &Tree) -> Result<usize> {
    let n = check_pair(t, f)?;
    let labels: &[Label] = t.labels();
    let mut count = 0;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let y = [labels[a], labels[b], labels[c], labels[d]];
                    if !t.restrict(&y)?.is_isomorphic(&f.restrict(&y)?) {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

pub fn distance_report(t: &Tree, f: &Tree, max_n: usize) -> Result<DistanceReport> {
    let n = check_metric_domain(t, f)?;
    let shared = coconvex_counts(&[t.clone(), f.clone()], max_n)?;
    let per_k: Vec<_> = (2..=n - 2)
        .map(|k| {
            let (s, d) = dk_from_table(n, k, &shared);
            (k, s, d)
        })
        .collect();
    let d_total = per_k.iter().map(|(_, _, d)| d).sum();
    Ok(DistanceReport {
        n,
        per_k,
        d_total,
        rf: rf_distance(t, f)?,
        quartet: quartet_distance(t, f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caterpillar::Caterpillar;
    use crate::convexity::enumerate_convex;
    use crate::rng::seeded;
    use alloc::collections::BTreeSet;
    use rand::Rng;

    fn cat(perm: &[Label]) -> Tree {
        Caterpillar::new(perm.to_vec()).unwrap().to_tree()
    }

    // |(P(T) Δ P(F)) ∩ P_{n,k}| by listing both sets
    fn dk_by_listing(t: &Tree, f: &Tree, k: usize) -> usize {
        let a: BTreeSet<_> = enumerate_convex(t, 18).unwrap().filter(|q| q.num_blocks() == k).collect();
        let b: BTreeSet<_> = enumerate_convex(f, 18).unwrap().filter(|q| q.num_blocks() == k).collect();
        a.symmetric_difference(&b).count()
    }

    // quartet topology from the cherry partner of the smallest label
    fn quartet_by_splits(t: &Tree, y: [Label; 4]) -> Vec<Label> {
        let r = t.restrict(&y).unwrap();
        r.split_labels().into_iter().next().unwrap()
    }

    #[test]
    fn five_leaf_example() {
        let (t, f) = (cat(&[1, 2, 3, 4, 5]), cat(&[1, 3, 2, 4, 5]));
        assert_eq!(dk_distance(&t, &f, 2, 18).unwrap(), BigUint::from(2u32));
        assert_eq!(rf_distance(&t, &f).unwrap(), 2);
        assert_eq!(quartet_distance(&t, &f).unwrap(), 2);
        // two differing quartets, each contributing one character to each side
        assert_eq!(dk_distance(&t, &f, 3, 18).unwrap(), BigUint::from(4u32));
        assert_eq!(dk_by_listing(&t, &f, 3), 4);
        assert_eq!(dk_by_listing(&t, &f, 2), 2);
    }

    #[test]
    fn domain_errors() {
        let (t, f) = (cat(&[1, 2, 3, 4, 5]), cat(&[1, 3, 2, 4, 5]));
        assert!(matches!(dk_distance(&t, &f, 1, 18), Err(Error::OutOfRange(_))));
        assert!(matches!(dk_distance(&t, &f, 4, 18), Err(Error::OutOfRange(_))));
        let small = cat(&[1, 2, 3]);
        assert!(matches!(character_distance(&small, &small, 18), Err(Error::OutOfRange(_))));
        assert!(matches!(rf_distance(&t, &cat(&[1, 2, 3, 4])), Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn identical_and_four_leaf_trees() {
        let t = cat(&[2, 4, 1, 3, 5, 6]);
        let report = distance_report(&t, &t, 18).unwrap();
        assert!(report.per_k.iter().all(|(_, _, d)| *d == BigUint::from(0u32)));
        assert_eq!(report.rf, 0);
        assert_eq!(report.quartet, 0);
        assert_eq!(rf_distance(&cat(&[1, 2, 3, 4]), &cat(&[1, 3, 2, 4])).unwrap(), 2);
    }

    #[test]
    fn quartet_brute_force_matches_split_comparison() {
        let mut rng = seeded(2);
        for _ in 0..20 {
            let n = rng.random_range(4..=9);
            let t = Tree::random(n, &mut rng).unwrap();
            let f = Tree::random(n, &mut rng).unwrap();
            let mut expected = 0;
            let l: Vec<Label> = (1..=n as Label).collect();
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        for d in c + 1..n {
                            let y = [l[a], l[b], l[c], l[d]];
                            expected += usize::from(quartet_by_splits(&t, y) != quartet_by_splits(&f, y));
                        }
                    }
                }
            }
            let q = quartet_distance(&t, &f).unwrap();
            assert_eq!(q, expected);
            assert!(q <= (n * (n - 1) * (n - 2) * (n - 3)) / 24);
        }
    }

    #[test]
    fn extreme_k_identities() {
        let mut rng = seeded(3);
        for _ in 0..30 {
            let n = rng.random_range(4..=11);
            let t = Tree::random(n, &mut rng).unwrap();
            let f = Tree::random(n, &mut rng).unwrap();
            let r = distance_report(&t, &f, 18).unwrap();
            assert_eq!(r.per_k[0].2, BigUint::from(r.rf));
            assert_eq!(r.per_k.last().unwrap().2, BigUint::from(2 * r.quartet));
            assert_eq!(character_distance(&t, &f, 18).unwrap(), r.d_total);
            for (k, _, d) in &r.per_k {
                assert_eq!(*d, BigUint::from(dk_by_listing(&t, &f, *k)));
                assert_eq!(d % 2u32, BigUint::from(0u32));
            }
        }
    }

    #[test]
    fn metric_axioms() {
        let mut rng = seeded(4);
        for _ in 0..25 {
            let n = rng.random_range(4..=9);
            let trees: Vec<Tree> = (0..3).map(|_| Tree::random(n, &mut rng).unwrap()).collect();
            let [a, b, c] = [&trees[0], &trees[1], &trees[2]];
            for k in 2..=n - 2 {
                let ab = dk_distance(a, b, k, 18).unwrap();
                let bc = dk_distance(b, c, k, 18).unwrap();
                let ac = dk_distance(a, c, k, 18).unwrap();
                assert_eq!(ab, dk_distance(b, a, k, 18).unwrap());
                assert!(&ab + &bc >= ac);
                assert_eq!(ab == BigUint::from(0u32), a.is_isomorphic(b));
            }
        }
    }
}
