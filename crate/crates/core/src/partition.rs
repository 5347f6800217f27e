//! Partitions of `[n]` in restricted-growth encoding.
//!
//! Element `i` (1-based) sits in block `rgs[i - 1]`; blocks are numbered in
//! order of their minimum element, so the encoding is unique per partition
//! and the derived ordering is the lexicographic order of encodings.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::caterpillar::Caterpillar;
use crate::error::{guard, Error, Result};
use crate::Label;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    rgs: Vec<u32>,
    blocks: u32,
}

/// Classification of a partition: `k` blocks, `s` of size at least two,
/// `ell` singletons, and its gap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartitionStats {
    pub k: usize,
    pub s: usize,
    pub ell: usize,
    pub gap: usize,
}

impl PartitionStats {
    /// At least two blocks of size at least two.
    pub fn is_nontrivial(&self) -> bool {
        self.s >= 2
    }
}

/// Predicate over [`PartitionStats`]; unset fields match anything.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StatsFilter {
    pub k: Option<usize>,
    pub ell: Option<usize>,
    pub min_big_blocks: Option<usize>,
    pub max_big_blocks: Option<usize>,
}

impl StatsFilter {
    pub fn blocks(k: usize) -> Self {
        StatsFilter {
            k: Some(k),
            ..Default::default()
        }
    }

    pub fn nontrivial() -> Self {
        StatsFilter {
            min_big_blocks: Some(2),
            ..Default::default()
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn matches(&self, stats: &PartitionStats) -> bool {
        self.k.is_none_or(|k| stats.k == k)
            && self.ell.is_none_or(|ell| stats.ell == ell)
            && self.min_big_blocks.is_none_or(|s| stats.s >= s)
            && self.max_big_blocks.is_none_or(|s| stats.s <= s)
    }

    pub fn is_empty(&self) -> bool {
        *self == StatsFilter::default()
    }
}

impl Partition {
    /// Builds a partition from a restricted-growth sequence.
    pub fn from_rgs(rgs: Vec<u32>) -> Result<Self> {
        let mut next = 0u32;
        for (i, &b) in rgs.iter().enumerate() {
            if b > next {
                return Err(Error::InvalidPartition(format!(
                    "position {} uses block {b} before block {next}",
                    i + 1
                )));
            }
            if b == next {
                next += 1;
            }
        }
        Ok(Partition { rgs, blocks: next })
    }

    /// Canonicalizes an arbitrary block assignment (`ids[i]` is the block of
    /// element `i + 1`; equal ids mean the same block).
    pub fn from_assignment<T: Copy + Eq + Ord>(ids: &[T]) -> Self {
        let mut seen: Vec<(T, u32)> = Vec::new();
        let mut rgs = Vec::with_capacity(ids.len());
        for &id in ids {
            let b = match seen.iter().find(|(s, _)| *s == id) {
                Some(&(_, b)) => b,
                None => {
                    let b = seen.len() as u32;
                    seen.push((id, b));
                    b
                }
            };
            rgs.push(b);
        }
        Partition {
            blocks: seen.len() as u32,
            rgs,
        }
    }

    /// Canonicalizes a dense assignment with ids below `bound`, in O(n).
    pub(crate) fn from_dense_assignment(ids: &[usize], bound: usize, scratch: &mut Vec<u32>) -> Self {
        scratch.clear();
        scratch.resize(bound, u32::MAX);
        let mut blocks = 0u32;
        let rgs = ids
            .iter()
            .map(|&id| {
                if scratch[id] == u32::MAX {
                    scratch[id] = blocks;
                    blocks += 1;
                }
                scratch[id]
            })
            .collect();
        Partition { rgs, blocks }
    }

    /// Builds a partition of `[n]` from explicit blocks.
    pub fn from_blocks<B: AsRef<[Label]>>(n: usize, blocks: &[B]) -> Result<Self> {
        let mut ids = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            let block = block.as_ref();
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in block {
                let x = x as usize;
                if x == 0 || x > n {
                    return Err(Error::InvalidPartition(format!("element {x} outside [1, {n}]")));
                }
                if ids[x - 1] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("duplicate element {x}")));
                }
                ids[x - 1] = b;
            }
        }
        if let Some(missing) = ids.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!("element {} is not covered", missing + 1)));
        }
        Ok(Partition::from_assignment(&ids))
    }

    pub fn discrete(n: usize) -> Self {
        Partition {
            rgs: (0..n as u32).collect(),
            blocks: n as u32,
        }
    }

    pub fn single_block(n: usize) -> Self {
        Partition {
            rgs: vec![0; n],
            blocks: u32::from(n > 0),
        }
    }

    pub fn n(&self) -> usize {
        self.rgs.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks as usize
    }

    /// The canonical restricted-growth encoding.
    pub fn rgs(&self) -> &[u32] {
        &self.rgs
    }

    /// Block index of `label` (1-based label).
    pub fn block_of(&self, label: Label) -> usize {
        self.rgs[label as usize - 1] as usize
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_blocks()];
        for &b in &self.rgs {
            sizes[b as usize] += 1;
        }
        sizes
    }

    /// Blocks ordered by their minimum element, elements ascending.
    pub fn blocks(&self) -> Vec<Vec<Label>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (i, &b) in self.rgs.iter().enumerate() {
            blocks[b as usize].push(i as Label + 1);
        }
        blocks
    }

    /// Labels that form singleton blocks.
    pub fn singletons(&self) -> Vec<Label> {
        let sizes = self.block_sizes();
        (1..=self.n() as Label)
            .filter(|&x| sizes[self.block_of(x)] == 1)
            .collect()
    }

    pub fn stats(&self) -> PartitionStats {
        let k = self.num_blocks();
        let mut lo = vec![usize::MAX; k];
        let mut hi = vec![0usize; k];
        let mut size = vec![0usize; k];
        for (i, &b) in self.rgs.iter().enumerate() {
            let b = b as usize;
            lo[b] = lo[b].min(i);
            hi[b] = hi[b].max(i);
            size[b] += 1;
        }
        let ell = size.iter().filter(|&&c| c == 1).count();
        let gap = (0..k).map(|b| hi[b] + 1 - lo[b] - size[b]).sum();
        PartitionStats { k, s: k - ell, ell, gap }
    }

    /// Sum of block gaps.
    pub fn gap(&self) -> usize {
        self.stats().gap
    }

    /// Blocks of size at least two ordered by their leftmost leaf position
    /// in the caterpillar, followed by the singletons in label order.
    pub fn standard_listing(&self, perm: &Caterpillar) -> Result<Vec<Vec<Label>>> {
        if perm.n() != self.n() {
            return Err(Error::LabelMismatch(format!(
                "partition of [{}] against a caterpillar on {} leaves",
                self.n(),
                perm.n()
            )));
        }
        let positions = perm.positions();
        let (mut big, small): (Vec<_>, Vec<_>) = self.blocks().into_iter().partition(|b| b.len() >= 2);
        big.sort_by_key(|block| block.iter().map(|&x| positions[x as usize - 1]).min());
        big.extend(small);
        Ok(big)
    }
}

/// `gap(X) = max X - min X + 1 - |X|` for a nonempty set of integers.
pub fn gap_set(set: &[Label]) -> Result<usize> {
    let lo = set.iter().min().ok_or(Error::Empty("set"))?;
    let hi = set.iter().max().unwrap();
    let mut distinct = set.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    Ok((hi - lo) as usize + 1 - distinct.len())
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, block) in self.blocks().iter().enumerate() {
            if b > 0 {
                f.write_str("|")?;
            }
            for (i, x) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

/// Parses `"1,2,3|4,5|6,7"`. With `n = None` the ground set is `[max element]`.
pub fn parse_partition(text: &str, n: Option<usize>) -> Result<Partition> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Empty("partition"));
    }
    let mut blocks: Vec<Vec<Label>> = Vec::new();
    for part in text.split('|') {
        let mut block = Vec::new();
        for item in part.split(',') {
            let item = item.trim();
            if item.is_empty() {
                return Err(Error::InvalidPartition(String::from("empty block or element")));
            }
            let x: Label = item
                .parse()
                .map_err(|_| Error::InvalidPartition(format!("not a label: {item:?}")))?;
            block.push(x);
        }
        blocks.push(block);
    }
    let n = n.unwrap_or_else(|| blocks.iter().flatten().copied().max().unwrap_or(0) as usize);
    Partition::from_blocks(n, &blocks)
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_partition(s, None)
    }
}

/// Every partition of `[n]` in lexicographic order of encodings.
#[derive(Clone, Debug)]
pub struct AllPartitions {
    rgs: Vec<u32>,
    // prefix maxima: max[i] = max(rgs[..=i])
    max: Vec<u32>,
    done: bool,
}

impl Iterator for AllPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let n = self.rgs.len();
        let current = Partition {
            rgs: self.rgs.clone(),
            blocks: self.max.last().map_or(0, |m| m + 1),
        };
        // Advance: rightmost position that can grow.
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.rgs[i] <= self.max[i - 1] {
                self.rgs[i] += 1;
                self.max[i] = self.max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.max[j] = self.max[i];
                }
                break;
            }
        }
        Some(current)
    }
}

/// Streams every partition of `[n]`; refuses `n > max_n`.
pub fn enumerate_all_partitions(n: usize, max_n: usize) -> Result<AllPartitions> {
    guard("partition enumeration", n, max_n)?;
    Ok(AllPartitions {
        rgs: vec![0; n],
        max: vec![0; n],
        done: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::bell;
    use alloc::collections::BTreeSet;
    use alloc::string::ToString;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_stats() {
        let fig = p("1,2,3|4,5|6,7");
        assert_eq!(fig.num_blocks(), 3);
        let st = fig.stats();
        assert_eq!((st.k, st.s, st.ell), (3, 3, 0));

        let discrete = p("1|2|3|4");
        assert_eq!(discrete, Partition::discrete(4));
        assert_eq!(discrete.stats().k, 4);

        assert_eq!(p("3,1|2").to_string(), "1,3|2");

        let whole = Partition::single_block(6).stats();
        assert_eq!((whole.k, whole.s, whole.ell), (1, 1, 0));

        let t = p("1,2|3|4").stats();
        assert_eq!((t.k, t.s, t.ell), (3, 1, 2));
        assert!(!t.is_nontrivial());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("1,2|2,3".parse::<Partition>(), Err(Error::InvalidPartition(_))));
        assert!(matches!("1,2||3".parse::<Partition>(), Err(Error::InvalidPartition(_))));
        assert!(matches!(parse_partition("1,5|2", Some(4)), Err(Error::InvalidPartition(_))));
        assert!(matches!("1,3".parse::<Partition>(), Err(Error::InvalidPartition(_))));
        assert!(matches!("".parse::<Partition>(), Err(Error::Empty(_))));
        assert!(matches!("1,x".parse::<Partition>(), Err(Error::InvalidPartition(_))));
    }

    #[test]
    fn gaps() {
        assert_eq!(gap_set(&[1, 3, 7]).unwrap(), 4);
        assert_eq!(gap_set(&[4, 5, 6, 7]).unwrap(), 0);
        assert_eq!(gap_set(&[]), Err(Error::Empty("set")));
        assert_eq!(p("1,4|2,3").gap(), 2);
    }

    #[test]
    fn standard_listing_orders_big_blocks_by_leftmost_position() {
        let part = p("1,2,3|4,5|6,7");
        let id = Caterpillar::identity(7);
        assert_eq!(part.standard_listing(&id).unwrap(), vec![vec![1, 2, 3], vec![4, 5], vec![6, 7]]);
        let perm = Caterpillar::new(vec![5, 4, 7, 6, 1, 2, 3]).unwrap();
        assert_eq!(part.standard_listing(&perm).unwrap(), vec![vec![4, 5], vec![6, 7], vec![1, 2, 3]]);
        let discrete = Partition::discrete(5);
        let any = Caterpillar::new(vec![3, 1, 5, 2, 4]).unwrap();
        assert_eq!(
            discrete.standard_listing(&any).unwrap(),
            (1..=5).map(|x| vec![x]).collect::<Vec<_>>()
        );
    }

    #[test]
    fn enumeration_counts() {
        for n in 0..=8 {
            let all: Vec<_> = enumerate_all_partitions(n, 12).unwrap().collect();
            assert_eq!(BigUintLike::from(all.len()), bell(n));
            // lexicographic order and uniqueness
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
        let pairings: Vec<_> = enumerate_all_partitions(4, 12)
            .unwrap()
            .filter(|p| p.stats().s >= 2)
            .collect();
        assert_eq!(pairings.len(), 3);
        assert!(pairings.iter().all(|p| p.block_sizes() == vec![2, 2]));
        assert_eq!(
            enumerate_all_partitions(3, 12).unwrap().filter(|p| p.num_blocks() == 2).count(),
            3
        );
        assert!(matches!(enumerate_all_partitions(13, 12), Err(Error::GuardExceeded { .. })));
    }

    type BigUintLike = num_bigint::BigUint;

    #[test]
    fn encoding_is_a_bijection() {
        for n in 1..=8 {
            let mut seen = BTreeSet::new();
            for part in enumerate_all_partitions(n, 12).unwrap() {
                let decoded = Partition::from_blocks(n, &part.blocks()).unwrap();
                assert_eq!(decoded, part);
                assert_eq!(Partition::from_rgs(part.rgs().to_vec()).unwrap(), part);
                assert_eq!(part.to_string().parse::<Partition>().unwrap(), part);
                assert!(seen.insert(part.rgs().to_vec()));
            }
        }
    }

    #[test]
    fn stats_identities_and_singleton_gaps() {
        for n in 1..=8 {
            for part in enumerate_all_partitions(n, 12).unwrap() {
                let st = part.stats();
                assert_eq!(st.k, st.s + st.ell);
                let big: usize = part.block_sizes().into_iter().filter(|&s| s >= 2).sum();
                assert_eq!(n, st.ell + big);
                for x in part.singletons() {
                    assert_eq!(gap_set(&[x]).unwrap(), 0);
                }
                let big_gap: usize = part
                    .blocks()
                    .iter()
                    .filter(|b| b.len() >= 2)
                    .map(|b| gap_set(b).unwrap())
                    .sum();
                assert_eq!(big_gap, st.gap);
            }
        }
    }

    #[test]
    fn filter_matching() {
        let st = p("1,2|3,4|5").stats();
        assert!(StatsFilter::nontrivial().matches(&st));
        assert!(StatsFilter::blocks(3).matches(&st));
        assert!(!StatsFilter::blocks(2).matches(&st));
        assert!(StatsFilter::default().is_empty());
    }

    #[test]
    fn rgs_validation() {
        assert!(Partition::from_rgs(vec![0, 2, 1]).is_err());
        assert_eq!(Partition::from_rgs(vec![0, 1, 0]).unwrap().to_string(), "1,3|2");
        assert_eq!(Partition::from_assignment(&[7, 3, 7]).to_string(), "1,3|2");
        assert_eq!(Partition::single_block(0).num_blocks(), 0);
        let _ = format!("{:?}", p("1|2"));
    }
}
