//! Expected number of nontrivial characters shared by two uniformly random
//! caterpillars on `[n]`.
//!
//! With one tree fixed to `T_id`, a character with `m >= 2` big blocks and
//! `ell` singletons is convex on `T_id` exactly when its big blocks occupy
//! consecutive runs after deleting the singletons, and it is shared with a
//! random `T_pi` with probability `m! prod(a_j!) / (n - ell)!`, where the
//! `a_j` are the run lengths.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::caterpillar::Caterpillar;
use crate::combinatorics::{binomial, factorial};
use crate::error::{guard, Error, Result};
use crate::extremal::SharedCounter;
use crate::rng::stream;

/// Memoized `f(r, m)`: the sum over compositions of `r` into `m` parts, each
/// at least two, of the product of the factorials of the parts.
#[derive(Clone, Debug)]
pub struct CompositionWeights {
    max_r: usize,
    // table[r][m]
    table: Vec<Vec<BigUint>>,
}

impl CompositionWeights {
    pub fn new(max_r: usize) -> Self {
        let fact: Vec<BigUint> = (0..=max_r).map(factorial).collect();
        let max_m = max_r / 2;
        let mut table = vec![vec![BigUint::zero(); max_m + 1]; max_r + 1];
        for r in 2..=max_r {
            table[r][1] = fact[r].clone();
        }
        for m in 2..=max_m {
            for r in 2 * m..=max_r {
                let mut sum = BigUint::zero();
                for a in 2..=r - 2 * (m - 1) {
                    sum += &fact[a] * &table[r - a][m - 1];
                }
                table[r][m] = sum;
            }
        }
        CompositionWeights { max_r, table }
    }

    /// `f(r, m)`; zero when `r < 2m`.
    pub fn get(&self, r: usize, m: usize) -> BigUint {
        assert!(r <= self.max_r, "composition table built up to {}", self.max_r);
        self.table[r].get(m).cloned().unwrap_or_default()
    }
}

pub fn composition_weight(r: usize, m: usize) -> BigUint {
    if m == 0 || r < 2 * m {
        return BigUint::zero();
    }
    CompositionWeights::new(r).get(r, m)
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact expectation over uniform `pi` of the number of nontrivial
/// characters convex on both `T_id` and `T_pi`.
pub fn exact_expected_nontrivial(n: usize, max_n: usize) -> Result<BigRational> {
    if n < 4 {
        return Err(Error::OutOfRange(alloc::format!("expectation needs n >= 4, got {n}")));
    }
    guard("exact expectation", n, max_n)?;
    let weights = CompositionWeights::new(n);
    let mut total = BigRational::zero();
    for ell in 0..=n - 4 {
        let r = n - ell;
        let mut inner = BigUint::zero();
        for m in 2..=r / 2 {
            inner += factorial(m) * weights.get(r, m);
        }
        total += ratio(binomial(n, ell) * inner, factorial(r));
    }
    Ok(total)
}

/// Sample mean and standard error of a Monte-Carlo estimate, together with
/// the integer sums they come from. Merging sums keeps results independent
/// of how samples are split across workers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonteCarlo {
    pub samples: u64,
    pub sum: u128,
    pub sum_sq: u128,
}

impl MonteCarlo {
    pub fn add(&mut self, value: u64) {
        self.samples += 1;
        self.sum += value as u128;
        self.sum_sq += (value as u128) * (value as u128);
    }

    pub fn merge(&mut self, other: &MonteCarlo) {
        self.samples += other.samples;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.samples as f64
    }

    /// Standard error of the mean; zero for a single sample.
    pub fn std_error(&self) -> f64 {
        if self.samples < 2 {
            return 0.0;
        }
        let n = self.samples as f64;
        let mean = self.mean();
        let var = (self.sum_sq as f64 - n * mean * mean) / (n - 1.0);
        num_traits::Float::sqrt(var.max(0.0) / n)
    }
}

/// Value of sample `index`: the shared nontrivial count of `T_id` and a
/// random caterpillar drawn from stream `index` of `seed`.
pub fn mc_sample(counter: &SharedCounter, seed: u64, index: u64) -> u64 {
    let pi = Caterpillar::random(counter.n(), &mut stream(seed, index));
    let mut out = vec![0u64; counter.n() + 1];
    counter.count_into(pi.perm(), &mut out);
    out.iter().sum()
}

/// Samples `range` of the estimator; used by sequential and parallel drivers.
pub fn mc_range(counter: &SharedCounter, seed: u64, range: core::ops::Range<u64>) -> MonteCarlo {
    let mut acc = MonteCarlo::default();
    for i in range {
        acc.add(mc_sample(counter, seed, i));
    }
    acc
}

pub fn monte_carlo_expected(n: usize, samples: u64, seed: u64, max_n: usize) -> Result<MonteCarlo> {
    if samples == 0 {
        return Err(Error::OutOfRange("at least one sample is needed".into()));
    }
    let counter = SharedCounter::identity(n, max_n)?;
    Ok(mc_range(&counter, seed, 0..samples))
}

/// One row of the growth report.
#[derive(Clone, Debug, PartialEq)]
pub struct TrendRow {
    pub n: usize,
    pub expected: BigRational,
    /// `E n^2 / 2^n`.
    pub ratio: BigRational,
    /// `2^n - n + E`, the expected total number of shared characters.
    pub expected_total: BigRational,
}

impl TrendRow {
    pub fn ratio_f64(&self) -> f64 {
        self.ratio.to_f64().unwrap_or(f64::NAN)
    }
}

pub fn trend_table(n_from: usize, n_to: usize, max_n: usize) -> Result<Vec<TrendRow>> {
    if n_from < 4 || n_from > n_to {
        return Err(Error::OutOfRange(alloc::format!("need 4 <= from <= to, got {n_from}..{n_to}")));
    }
    guard("exact expectation", n_to, max_n)?;
    (n_from..=n_to)
        .map(|n| {
            let expected = exact_expected_nontrivial(n, max_n)?;
            let pow = BigUint::from(1u32) << n;
            let ratio = &expected * ratio(BigUint::from(n * n), pow.clone());
            let expected_total = &expected + BigRational::from_integer(BigInt::from(pow - BigUint::from(n)));
            Ok(TrendRow {
                n,
                expected,
                ratio,
                expected_total,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caterpillar::next_permutation;
    use crate::coconvex::coconvex_counts;
    use crate::Label;
    use num_traits::One;

    fn frac(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    // average over all n! permutations, straight from the coconvex tables
    fn brute_force_average(n: usize) -> BigRational {
        let id = Caterpillar::identity(n).to_tree();
        let mut perm: Vec<Label> = (1..=n as Label).collect();
        let mut sum = BigUint::zero();
        let mut count = 0u64;
        loop {
            let t = Caterpillar::new(perm.clone()).unwrap().to_tree();
            sum += coconvex_counts(&[id.clone(), t], 18).unwrap().total_nontrivial();
            count += 1;
            if !next_permutation(&mut perm) {
                break;
            }
        }
        ratio(sum, BigUint::from(count))
    }

    // compositions listed explicitly
    fn weight_by_listing(r: usize, m: usize) -> BigUint {
        if m == 0 {
            return if r == 0 { BigUint::one() } else { BigUint::zero() };
        }
        (2..=r).map(|a| factorial(a) * weight_by_listing(r - a, m - 1)).sum()
    }

    #[test]
    fn composition_examples() {
        assert_eq!(composition_weight(4, 2), BigUint::from(4u32));
        assert_eq!(composition_weight(5, 2), BigUint::from(24u32));
        assert_eq!(composition_weight(6, 3), BigUint::from(8u32));
        assert_eq!(composition_weight(5, 3), BigUint::zero());
        let w = CompositionWeights::new(16);
        for r in 0..=16 {
            for m in 1..=8 {
                assert_eq!(w.get(r, m), weight_by_listing(r, m), "f({r}, {m})");
            }
        }
    }

    #[test]
    fn exact_small_values() {
        assert_eq!(exact_expected_nontrivial(4, 60).unwrap(), frac(1, 3));
        assert_eq!(exact_expected_nontrivial(5, 60).unwrap(), frac(31, 15));
        assert!(exact_expected_nontrivial(3, 60).is_err());
        assert!(exact_expected_nontrivial(61, 60).is_err());
    }

    #[test]
    fn exact_matches_permutation_average() {
        for n in 4..=6 {
            assert_eq!(exact_expected_nontrivial(n, 60).unwrap(), brute_force_average(n), "n = {n}");
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_close() {
        let a = monte_carlo_expected(4, 10_000, 9, 18).unwrap();
        let b = monte_carlo_expected(4, 10_000, 9, 18).unwrap();
        assert_eq!(a, b);
        let exact = 1.0 / 3.0;
        assert!((a.mean() - exact).abs() <= 5.0 * a.std_error());
        let one = monte_carlo_expected(6, 1, 0, 18).unwrap();
        assert_eq!(one.mean().fract(), 0.0);
        assert_eq!(one.std_error(), 0.0);
        assert!(monte_carlo_expected(6, 0, 0, 18).is_err());
    }

    #[test]
    fn split_sampling_matches_sequential() {
        let counter = SharedCounter::identity(8, 18).unwrap();
        let whole = mc_range(&counter, 3, 0..500);
        let mut parts = mc_range(&counter, 3, 0..123);
        parts.merge(&mc_range(&counter, 3, 123..500));
        assert_eq!(parts, whole);
    }

    #[test]
    fn trend_rows() {
        let rows = trend_table(4, 30, 60).unwrap();
        assert_eq!(rows[0].expected, frac(1, 3));
        assert!(rows.iter().all(|r| r.ratio > BigRational::zero()));
        assert!(rows.windows(2).all(|w| w[0].expected < w[1].expected));
        assert_eq!(rows[0].expected_total, frac(12, 1) + frac(1, 3));
        assert!(trend_table(3, 5, 60).is_err());
        assert!(trend_table(10, 61, 60).is_err());
    }
}
