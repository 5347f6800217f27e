//! Minimum shared counts over caterpillar pairs, the explicit
//! constructions that bound them, and agreement-based witnesses.
//!
//! Trivial characters (at most one block of size two or more) are convex on
//! every tree, so the search only tracks nontrivial shared characters and
//! adds the trivial census back at the end.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::caterpillar::{canonical_prefixes, canonical_with_prefix, Caterpillar};
use crate::coconvex::{coconvex_counts, enumerate_coconvex, CoconvexTester};
use crate::combinatorics::{binomial, trivial_count};
use crate::convexity::enumerate_convex;
use crate::error::{guard, Error, Result};
use crate::partition::Partition;
use crate::tree::Tree;
use crate::Label;

const SINGLETON: u8 = u8::MAX;

/// The nontrivial convex characters of a fixed tree, packed for fast
/// caterpillar membership tests.
#[derive(Clone, Debug)]
pub struct SharedCounter {
    n: usize,
    // n entries per member: big-block index or SINGLETON
    blocks: Vec<u8>,
    by_k: Vec<Range<usize>>,
}

impl SharedCounter {
    pub fn new(fixed: &Tree, max_n: usize) -> Result<Self> {
        let n = fixed.n();
        if n > 64 {
            return Err(Error::GuardExceeded {
                what: "shared counter",
                n,
                limit: 64,
            });
        }
        let mut members: Vec<(usize, Vec<u8>)> = Vec::new();
        for p in enumerate_convex(fixed, max_n)? {
            let sizes = p.block_sizes();
            if sizes.iter().filter(|&&s| s >= 2).count() < 2 {
                continue;
            }
            let mut index = vec![SINGLETON; sizes.len()];
            let mut next = 0u8;
            for (b, &s) in sizes.iter().enumerate() {
                if s >= 2 {
                    index[b] = next;
                    next += 1;
                }
            }
            members.push((p.num_blocks(), p.rgs().iter().map(|&b| index[b as usize]).collect()));
        }
        members.sort();
        let mut by_k = vec![0..0; n + 1];
        let mut blocks = Vec::with_capacity(members.len() * n);
        for (i, (k, m)) in members.iter().enumerate() {
            if by_k[*k].is_empty() {
                by_k[*k] = i..i;
            }
            by_k[*k].end = i + 1;
            blocks.extend_from_slice(m);
        }
        Ok(SharedCounter { n, blocks, by_k })
    }

    /// Counter for the standard caterpillar `T_id`.
    pub fn identity(n: usize, max_n: usize) -> Result<Self> {
        SharedCounter::new(&Caterpillar::identity(n).to_tree(), max_n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nontrivial members.
    pub fn len(&self) -> usize {
        self.blocks.len() / self.n.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    fn member_on(&self, i: usize, perm: &[Label]) -> bool {
        let m = &self.blocks[i * self.n..(i + 1) * self.n];
        let mut closed = 0u64;
        let mut current = SINGLETON;
        for &label in perm {
            let b = m[label as usize - 1];
            if b == SINGLETON || b == current {
                continue;
            }
            if closed >> b & 1 == 1 {
                return false;
            }
            if current != SINGLETON {
                closed |= 1 << current;
            }
            current = b;
        }
        true
    }

    /// Nontrivial characters with `k` blocks shared with `T_perm`.
    pub fn count_k(&self, perm: &[Label], k: usize) -> u64 {
        self.by_k.get(k).map_or(0, |r| r.clone().filter(|&i| self.member_on(i, perm)).count() as u64)
    }

    /// Adds the nontrivial shared counts per `k` into `out[k]`.
    pub fn count_into(&self, perm: &[Label], out: &mut [u64]) {
        for (k, r) in self.by_k.iter().enumerate() {
            out[k] += r.clone().filter(|&i| self.member_on(i, perm)).count() as u64;
        }
    }

    /// Nontrivial members shared with the whole collection, per `k`.
    pub fn count_all_into(&self, perms: &[&[Label]], out: &mut [u64]) {
        for (k, r) in self.by_k.iter().enumerate() {
            out[k] += r
                .clone()
                .filter(|&i| perms.iter().all(|p| self.member_on(i, p)))
                .count() as u64;
        }
    }
}

/// Running minimum with its lexicographically least witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinAccumulator {
    pub cap: usize,
    pub value: Option<u64>,
    pub witnesses: Vec<Vec<Label>>,
    pub witness_count: u64,
}

impl MinAccumulator {
    pub fn new(cap: usize) -> Self {
        MinAccumulator {
            cap,
            value: None,
            witnesses: Vec::new(),
            witness_count: 0,
        }
    }

    fn keep(&mut self, perm: &[Label]) {
        if let Err(at) = self.witnesses.binary_search_by(|w| w.as_slice().cmp(perm)) {
            if at < self.cap {
                self.witnesses.insert(at, perm.to_vec());
                self.witnesses.truncate(self.cap);
            }
        }
    }

    pub fn offer(&mut self, value: u64, perm: &[Label]) {
        match self.value {
            Some(v) if value > v => {}
            Some(v) if value == v => {
                self.witness_count += 1;
                self.keep(perm);
            }
            _ => {
                self.value = Some(value);
                self.witnesses.clear();
                self.witness_count = 1;
                self.keep(perm);
            }
        }
    }

    /// Combines two accumulators; the result does not depend on how the
    /// candidates were split between them.
    pub fn merge(&mut self, other: &MinAccumulator) {
        let Some(ov) = other.value else { return };
        match self.value {
            Some(v) if ov > v => {}
            Some(v) if ov == v => {
                self.witness_count += other.witness_count;
                for w in &other.witnesses {
                    self.keep(w);
                }
            }
            _ => *self = other.clone(),
        }
    }
}

/// Partial state of an exhaustive search: one accumulator per `k` (index
/// `0..=n`) and one for the total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchState {
    pub n: usize,
    pub per_k: Vec<MinAccumulator>,
    pub total: MinAccumulator,
    pub examined: u64,
}

impl SearchState {
    pub fn new(n: usize, cap: usize) -> Self {
        SearchState {
            n,
            per_k: vec![MinAccumulator::new(cap); n + 1],
            total: MinAccumulator::new(cap),
            examined: 0,
        }
    }

    pub fn examine(&mut self, counter: &SharedCounter, perm: &[Label], scratch: &mut Vec<u64>) {
        scratch.clear();
        scratch.resize(self.n + 1, 0);
        counter.count_into(perm, scratch);
        for (acc, &c) in self.per_k.iter_mut().zip(scratch.iter()) {
            acc.offer(c, perm);
        }
        self.total.offer(scratch.iter().sum(), perm);
        self.examined += 1;
    }

    /// Examines every canonical caterpillar starting with `prefix`.
    pub fn examine_chunk(&mut self, counter: &SharedCounter, prefix: &[Label]) -> Result<()> {
        let mut scratch = Vec::new();
        for c in canonical_with_prefix(self.n, prefix, usize::MAX)? {
            self.examine(counter, c.perm(), &mut scratch);
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &SearchState) {
        assert_eq!(self.n, other.n, "merging searches of different sizes");
        for (a, b) in self.per_k.iter_mut().zip(&other.per_k) {
            a.merge(b);
        }
        self.total.merge(&other.total);
        self.examined += other.examined;
    }

    pub fn finish(&self) -> SearchReport {
        let n = self.n;
        let result = |k: Option<usize>, acc: &MinAccumulator, base: BigUint| ExtremalResult {
            n,
            k,
            value: base + acc.value.unwrap_or(0),
            witnesses: acc
                .witnesses
                .iter()
                .map(|w| Caterpillar::new(w.clone()).expect("witness is a permutation"))
                .collect(),
            witness_count: acc.witness_count,
            search_space: self.examined,
        };
        let per_k = (1..=n).map(|k| result(Some(k), &self.per_k[k], trivial_count(n, k))).collect();
        let trivial_total: BigUint = (1..=n).map(|k| trivial_count(n, k)).sum();
        SearchReport {
            n,
            per_k,
            total: result(None, &self.total, trivial_total),
        }
    }
}

/// Minimum shared count with the witnesses achieving it. Witnesses are
/// canonical permutations `pi` of the pair `(T_id, T_pi)`, at most the
/// accumulator cap of them, lexicographically least first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalResult {
    pub n: usize,
    pub k: Option<usize>,
    pub value: BigUint,
    pub witnesses: Vec<Caterpillar>,
    pub witness_count: u64,
    pub search_space: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub n: usize,
    /// `c_{n,k}` for `k = 1..=n` (index `k - 1`).
    pub per_k: Vec<ExtremalResult>,
    /// `c_n`.
    pub total: ExtremalResult,
}

impl SearchReport {
    pub fn cnk(&self, k: usize) -> &ExtremalResult {
        &self.per_k[k - 1]
    }
}

/// Default number of stored witnesses per minimum.
pub const WITNESS_CAP: usize = 100;

/// Exhaustive search over all caterpillar pairs on `[n]`, single-threaded.
pub fn exhaustive_search(n: usize, max_n: usize) -> Result<SearchReport> {
    guard("exhaustive caterpillar search", n, max_n)?;
    if n == 0 {
        return Err(Error::OutOfRange("n must be positive".into()));
    }
    let counter = SharedCounter::identity(n, usize::MAX)?;
    let mut state = SearchState::new(n, WITNESS_CAP);
    for prefix in canonical_prefixes(n) {
        state.examine_chunk(&counter, &prefix)?;
    }
    Ok(state.finish())
}

pub fn exhaustive_cnk(n: usize, k: usize, max_n: usize) -> Result<ExtremalResult> {
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} outside [1, {n}]")));
    }
    Ok(exhaustive_search(n, max_n)?.per_k.swap_remove(k - 1))
}

pub fn exhaustive_cn(n: usize, max_n: usize) -> Result<ExtremalResult> {
    Ok(exhaustive_search(n, max_n)?.total)
}

/// Shared count of `(T_id, T_perm)` for each `k`, including trivial
/// characters (index `k`, `0..=n`).
pub fn shared_with_identity(counter: &SharedCounter, perm: &Caterpillar) -> Vec<BigUint> {
    let n = counter.n();
    let mut out = vec![0u64; n + 1];
    counter.count_into(perm.perm(), &mut out);
    out.iter().enumerate().map(|(k, &c)| trivial_count(n, k) + c).collect()
}

/// Minimum shared counts over all pairs of binary trees on `[n]`; the first
/// tree ranges over one labeling per unlabeled shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePairReport {
    pub n: usize,
    /// `s_{n,k}` for `k = 1..=n` (index `k - 1`).
    pub per_k: Vec<BigUint>,
    pub total: BigUint,
    pub pairs: u64,
}

pub fn tree_pair_search(n: usize, max_n: usize) -> Result<TreePairReport> {
    guard("tree pair search", n, max_n)?;
    let all = Tree::all(n, usize::MAX)?;
    let mut seen = BTreeSet::new();
    let shapes: Vec<&Tree> = all.iter().filter(|t| seen.insert(t.shape_signature())).collect();
    let mut per_k: Vec<Option<BigUint>> = vec![None; n];
    let mut total: Option<BigUint> = None;
    let mut pairs = 0;
    for t in shapes {
        for f in &all {
            let table = coconvex_counts(&[(*t).clone(), f.clone()], usize::MAX)?;
            for (k, slot) in per_k.iter_mut().enumerate() {
                let c = table.by_k(k + 1);
                if slot.as_ref().is_none_or(|v| &c < v) {
                    *slot = Some(c);
                }
            }
            let c = table.total();
            if total.as_ref().is_none_or(|v| &c < v) {
                total = Some(c);
            }
            pairs += 1;
        }
    }
    Ok(TreePairReport {
        n,
        per_k: per_k.into_iter().map(|v| v.unwrap_or_default()).collect(),
        total: total.unwrap_or_default(),
        pairs,
    })
}

/// The caterpillar pairing with `T_id` to share no nontrivial character
/// with at most `ceil(n/3)` blocks.
pub fn thm42_permutation(n: usize) -> Result<Caterpillar> {
    if n < 4 {
        return Err(Error::OutOfRange(format!("construction needs n >= 4, got {n}")));
    }
    let c = (2 * n).div_ceil(3) as Label;
    let n = n as Label;
    let odd = |x: &Label| x % 2 == 1;
    let even = |x: &Label| x.is_multiple_of(2);
    let mut perm: Vec<Label> = (1..=c).rev().filter(odd).collect();
    perm.extend((c + 1..=n).filter(odd));
    perm.extend((c + 1..=n).rev().filter(even));
    perm.extend((1..=c).filter(even));
    Caterpillar::new(perm)
}

fn subsets(set: &[Label], size: usize) -> Vec<Vec<Label>> {
    fn go(set: &[Label], size: usize, start: usize, cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..set.len() {
            if set.len() - i < size - cur.len() {
                break;
            }
            cur.push(set[i]);
            go(set, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= set.len() {
        go(set, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

fn check_quarter_n(n: usize) -> Result<()> {
    if !n.is_multiple_of(4) || n < 8 {
        return Err(Error::OutOfRange(format!("n = {n} must be a multiple of 4 and at least 8")));
    }
    Ok(())
}

fn check_residue_ell(n: usize, ell: usize) -> Result<()> {
    check_quarter_n(n)?;
    if ell < n / 2 || ell + 4 > n {
        return Err(Error::OutOfRange(format!("ell = {ell} outside [{}, {}]", n / 2, n - 4)));
    }
    Ok(())
}

fn residue_range(n: usize, ell: usize) -> core::ops::RangeInclusive<usize> {
    let t = n - ell;
    let q = n / 4;
    2.max(t.saturating_sub(q))..=(t - 2).min(q)
}

/// The two sets the witnesses draw their big blocks from, for the pair
/// `(T_id, T_pi)`.
pub fn thm31_sets(pi: &Caterpillar) -> Result<(Vec<Label>, Vec<Label>)> {
    let n = pi.n();
    check_quarter_n(n)?;
    let half = n / 2;
    let in_x: Vec<bool> = {
        let mut v = vec![false; n];
        for &l in &pi.perm()[..half] {
            v[l as usize - 1] = true;
        }
        v
    };
    let pick = |first_half: bool, x: bool| -> Vec<Label> {
        (1..=n as Label)
            .filter(|&l| ((l as usize) <= half) == first_half && in_x[l as usize - 1] == x)
            .collect()
    };
    let (ax, by, ay, bx) = (pick(true, true), pick(false, false), pick(true, false), pick(false, true));
    if ax.len() + by.len() >= ay.len() + bx.len() {
        Ok((ax, by))
    } else {
        Ok((ay, bx))
    }
}

/// Partitions with two big blocks and `ell` singletons shared by `T_id` and
/// `T_pi`, built from the larger pair of aligned half-intersections.
pub fn thm31_witnesses(pi: &Caterpillar, ell: usize) -> Result<Vec<Partition>> {
    let n = pi.n();
    check_residue_ell(n, ell)?;
    let (first, second) = thm31_sets(pi)?;
    let t = n - ell;
    let mut out = BTreeSet::new();
    for i in residue_range(n, ell) {
        for z1 in subsets(&first, i) {
            for z2 in subsets(&second, t - i) {
                let mut ids: Vec<usize> = (0..n).map(|j| j + 2).collect();
                for &l in &z1 {
                    ids[l as usize - 1] = 0;
                }
                for &l in &z2 {
                    ids[l as usize - 1] = 1;
                }
                out.insert(Partition::from_assignment(&ids));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// `sum_i C(n/4, i) C(n/4, n-ell-i)` over the admissible `i`.
pub fn residue_sum(n: usize, ell: usize) -> Result<BigUint> {
    check_residue_ell(n, ell)?;
    let q = n / 4;
    Ok(residue_range(n, ell).map(|i| binomial(q, i) * binomial(q, n - ell - i)).sum())
}

/// Lower bound on `c_{n,k}` for `n/2 + 2 <= k <= n-2` from the witness
/// families with `k - 2` singletons.
pub fn bound_witness(n: usize, k: usize) -> Result<BigUint> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("k = {k} too small")));
    }
    Ok(binomial(n, k - 1) + residue_sum(n, k - 2)?)
}

/// `C(n, k-1) + (1 - 4/(n-k+3)) C(n/2, n-k+2)` for `3n/4 <= k <= n-2`, exact.
pub fn bound_truncated_exact(n: usize, k: usize) -> Result<BigRational> {
    check_quarter_n(n)?;
    if 4 * k < 3 * n || k + 2 > n {
        return Err(Error::OutOfRange(format!("k = {k} outside [{}, {}]", 3 * n / 4, n - 2)));
    }
    let factor = BigRational::one() - BigRational::new(BigInt::from(4), BigInt::from(n - k + 3));
    let tail = BigRational::from_integer(BigInt::from(binomial(n / 2, n - k + 2)));
    Ok(BigRational::from_integer(BigInt::from(binomial(n, k - 1))) + factor * tail)
}

/// Integer form of [`bound_truncated_exact`] (counts are integers).
pub fn bound_truncated(n: usize, k: usize) -> Result<BigUint> {
    let exact = bound_truncated_exact(n, k)?;
    Ok(exact.ceil().to_integer().to_biguint().expect("bound is positive"))
}

/// `C(n, k-1) + sum_{i=3n/4-k+2}^{n/4} C(n/4, i) C(n/4, n-k+2-i)` for
/// `n/2 + 2 <= k <= 3n/4 - 1`.
pub fn bound_middle(n: usize, k: usize) -> Result<BigUint> {
    check_quarter_n(n)?;
    if k < n / 2 + 2 || 4 * (k + 1) > 3 * n {
        return Err(Error::OutOfRange(format!("k = {k} outside [{}, {}]", n / 2 + 2, 3 * n / 4 - 1)));
    }
    let q = n / 4;
    let sum: BigUint = (3 * n / 4 + 2 - k..=q).map(|i| binomial(q, i) * binomial(q, n - k + 2 - i)).sum();
    Ok(binomial(n, k - 1) + sum)
}

/// Lower bound on `c_n`: the trivial census plus every witness family.
pub fn cn_lower_bound(n: usize) -> Result<BigUint> {
    check_quarter_n(n)?;
    let mut total = (BigUint::one() << n) - BigUint::from(n);
    for ell in n / 2..=n - 4 {
        total += residue_sum(n, ell)?;
    }
    Ok(total)
}

/// `2^n + 2^(2 floor(n/4)) / 2`, the leading terms of the asymptotic bound.
pub fn cn_reference(n: usize) -> BigUint {
    (BigUint::one() << n) + (BigUint::one() << (2 * (n / 4))) / 2u32
}

/// One `k` row of a bound table. Bounds are `None` where inadmissible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub n: usize,
    pub k: usize,
    pub trivial: BigUint,
    pub bound_witness: Option<BigUint>,
    pub bound_truncated: Option<BigUint>,
    pub bound_middle: Option<BigUint>,
    pub exhaustive: Option<BigUint>,
    pub witness_count: Option<u64>,
}

impl BoundRow {
    /// Largest admissible bound.
    pub fn best_bound(&self) -> BigUint {
        [&self.bound_witness, &self.bound_truncated, &self.bound_middle]
            .into_iter()
            .flatten()
            .chain(core::iter::once(&self.trivial))
            .max()
            .cloned()
            .unwrap_or_default()
    }

    /// False when an exhaustive value lies below some bound.
    pub fn consistent(&self) -> bool {
        self.exhaustive.as_ref().is_none_or(|v| *v >= self.best_bound())
    }
}

pub fn bound_table(n: usize, exhaustive: Option<&SearchReport>) -> Vec<BoundRow> {
    (1..=n)
        .map(|k| BoundRow {
            n,
            k,
            trivial: trivial_count(n, k),
            bound_witness: bound_witness(n, k).ok().filter(|_| k >= n / 2 + 2 && k + 2 <= n),
            bound_truncated: bound_truncated(n, k).ok(),
            bound_middle: bound_middle(n, k).ok(),
            exhaustive: exhaustive.map(|r| r.cnk(k).value.clone()),
            witness_count: exhaustive.map(|r| r.cnk(k).witness_count),
        })
        .collect()
}

/// The classes `D_i = {x in [n] : x = i mod m}` for `i = 0..m`.
pub fn residue_blocks(n: usize, m: usize) -> Vec<Vec<Label>> {
    (0..m)
        .map(|i| (1..=n as Label).filter(|&x| x as usize % m == i).collect())
        .collect()
}

fn concat(blocks: &[Vec<Label>]) -> Caterpillar {
    Caterpillar::new(blocks.concat()).expect("blocks partition [n]")
}

/// `id`, `rho`, the `m` block reversals `rho_i`, and the `2(m-2)` block
/// interchanges `rho^(0,i)` and `rho^(i,m-1)`; `3m - 2` caterpillars in
/// this order.
pub fn thm62_family(n: usize, m: usize) -> Result<Vec<Caterpillar>> {
    if m < 3 || m >= n {
        return Err(Error::OutOfRange(format!("m = {m} outside [3, {})", n)));
    }
    let d = residue_blocks(n, m);
    let mut family = vec![Caterpillar::identity(n), concat(&d)];
    for i in 0..m {
        let mut b = d.clone();
        b[i].reverse();
        family.push(concat(&b));
    }
    for i in 1..m - 1 {
        let mut b = d.clone();
        b.swap(0, i);
        family.push(concat(&b));
    }
    for i in 1..m - 1 {
        let mut b = d.clone();
        b.swap(i, m - 1);
        family.push(concat(&b));
    }
    Ok(family)
}

/// Outcome of checking the block structure of the common nontrivial
/// characters of a caterpillar family against the classes `D_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResidueProbe {
    pub examined: u64,
    pub nontrivial: u64,
    /// Nontrivial characters with a block meeting two classes.
    pub block_violations: Vec<Partition>,
    /// Nontrivial characters with `m k < (m-1) n + s`.
    pub size_violations: Vec<Partition>,
    pub min_k: Option<usize>,
}

pub fn residue_probe(family: &[Caterpillar], m: usize, max_n: usize) -> Result<ResidueProbe> {
    let first = family.first().ok_or(Error::Empty("caterpillar family"))?;
    let n = first.n();
    let trees: Vec<Tree> = family.iter().map(|c| c.to_tree()).collect();
    // stream the tree with the fewest candidates first; all are equal so use rho when present
    let lead = usize::from(trees.len() > 1);
    let mut ordered = vec![trees[lead].clone()];
    ordered.extend(trees.iter().enumerate().filter(|&(i, _)| i != lead).map(|(_, t)| t.clone()));
    let mut probe = ResidueProbe::default();
    for p in enumerate_coconvex(&ordered, max_n)? {
        probe.examined += 1;
        let st = p.stats();
        if !st.is_nontrivial() {
            continue;
        }
        probe.nontrivial += 1;
        probe.min_k = Some(probe.min_k.map_or(st.k, |v| v.min(st.k)));
        let crosses = p
            .blocks()
            .iter()
            .any(|b| b.iter().any(|&x| x as usize % m != b[0] as usize % m));
        if crosses {
            probe.block_violations.push(p.clone());
        }
        if m * st.k < (m - 1) * n + st.s {
            probe.size_violations.push(p);
        }
    }
    Ok(probe)
}

fn longest_monotone(seq: &[usize]) -> Vec<usize> {
    fn increasing(seq: &[usize]) -> Vec<usize> {
        // patience sorting; tails[j] = index of the smallest tail of a run of length j + 1
        let mut tails: Vec<usize> = Vec::new();
        let mut prev = vec![usize::MAX; seq.len()];
        for (i, &x) in seq.iter().enumerate() {
            let j = tails.partition_point(|&t| seq[t] < x);
            if j > 0 {
                prev[i] = tails[j - 1];
            }
            if j == tails.len() {
                tails.push(i);
            } else {
                tails[j] = i;
            }
        }
        let mut out = Vec::with_capacity(tails.len());
        let mut cur = tails.last().copied().unwrap_or(usize::MAX);
        while cur != usize::MAX {
            out.push(cur);
            cur = prev[cur];
        }
        out.reverse();
        out
    }
    let up = increasing(seq);
    let flipped: Vec<usize> = seq.iter().map(|&x| usize::MAX - x).collect();
    let down = increasing(&flipped);
    if down.len() > up.len() {
        down
    } else {
        up
    }
}

/// Leaves of a largest common monotone subsequence of two caterpillars,
/// listed in left-to-right order of `p1`. Both trees restrict to the same
/// caterpillar on this set.
pub fn lis_agreement(p1: &Caterpillar, p2: &Caterpillar) -> Result<Vec<Label>> {
    common_monotone_labels(&[p1.clone(), p2.clone()])
}

/// Repeated monotone thinning across a collection: the result is monotone
/// in the order of every member.
pub fn common_monotone_labels(perms: &[Caterpillar]) -> Result<Vec<Label>> {
    let first = perms.first().ok_or(Error::Empty("caterpillar collection"))?;
    if perms.iter().any(|c| c.n() != first.n()) {
        return Err(Error::LabelMismatch("caterpillars of different sizes".into()));
    }
    let mut y: Vec<Label> = first.perm().to_vec();
    for other in &perms[1..] {
        let pos = other.positions();
        let seq: Vec<usize> = y.iter().map(|&l| pos[l as usize - 1]).collect();
        y = longest_monotone(&seq).into_iter().map(|i| y[i]).collect();
    }
    Ok(y)
}

/// Pairs consecutive labels of `agreement` into `pairs` doubletons and keeps
/// every other leaf a singleton, giving `n - pairs` blocks.
pub fn doubleton_character(n: usize, agreement: &[Label], pairs: usize) -> Result<Partition> {
    if 2 * pairs > agreement.len() {
        return Err(Error::OutOfRange(format!(
            "{pairs} doubletons need {} agreement leaves, have {}",
            2 * pairs,
            agreement.len()
        )));
    }
    let mut ids: Vec<usize> = (0..n).map(|i| n + i).collect();
    for (j, pair) in agreement.chunks(2).take(pairs).enumerate() {
        for &l in pair {
            ids[l as usize - 1] = j;
        }
    }
    Ok(Partition::from_assignment(&ids))
}

/// Whether `perm` attains the exhaustive minimum for `k`.
pub fn is_minimizer(counter: &SharedCounter, report: &SearchReport, perm: &Caterpillar, k: usize) -> bool {
    let shared = trivial_count(counter.n(), k) + counter.count_k(perm.perm(), k);
    shared == report.cnk(k).value
}

/// Number of doubleton-plus-singletons characters convex on both `T_id`
/// and `T_perm`.
pub fn doubleton_census(perm: &Caterpillar) -> u64 {
    let n = perm.n();
    let tester = CoconvexTester::from_caterpillars(&[Caterpillar::identity(n), perm.clone()]).expect("same size");
    let mut count = 0;
    for a in 1..=n as Label {
        for b in a + 1..=n as Label {
            let p = doubleton_character(n, &[a, b], 1).expect("two leaves");
            if tester.test(&p).expect("sizes match") {
                count += 1;
            }
        }
    }
    count
}

/// Formats an exact rational bound as a decimal with `digits` places.
pub fn decimal(value: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (value * BigRational::from_integer(scale.clone())).round().to_integer();
    let (int, frac) = (&scaled / &scale, (&scaled % &scale).magnitude().clone());
    if digits == 0 {
        return format!("{int}");
    }
    format!("{int}.{:0>width$}", frac, width = digits)
}

/// Lossy conversion for reporting.
pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
