//! Exact integer helpers: binomials, factorials, Fibonacci and Bell numbers.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` for signed arguments; zero outside `0 <= k <= n`.
pub fn binomial_signed(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        BigUint::zero()
    } else {
        binomial(n as usize, k as usize)
    }
}

/// `C(n, k)` when it fits in a `u64`.
pub fn binomial_u64(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Fibonacci number with `F_1 = F_2 = 1`.
pub fn fibonacci(n: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let next = &a + &b;
        a = core::mem::replace(&mut b, next);
    }
    a
}

/// Bell number `B(n)` via the Bell triangle.
pub fn bell(n: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().cloned().unwrap_or_else(BigUint::one));
        for value in &row {
            let v = next.last().unwrap() + value;
            next.push(v);
        }
        row = next;
    }
    row[0].clone()
}

/// Number of trivial characters with exactly `k` classes on `n` leaves:
/// one class of size at least two plus `k - 1` singletons, or the discrete
/// partition when `k = n`.
pub fn trivial_count(n: usize, k: usize) -> BigUint {
    if k == 0 || k > n {
        BigUint::zero()
    } else if k == n {
        BigUint::one()
    } else {
        binomial(n, k - 1)
    }
}
