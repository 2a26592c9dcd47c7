//! Binomial coefficients and Stirling numbers of the second kind.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Memoized Pascal and Stirling triangles up to a fixed size.
#[derive(Debug, Clone)]
pub struct CombTable {
    binom: Vec<Vec<BigInt>>,
    stirling: Vec<Vec<BigInt>>,
}

impl CombTable {
    pub fn new(max: usize) -> Self {
        let mut binom: Vec<Vec<BigInt>> = Vec::with_capacity(max + 1);
        for n in 0..=max {
            let mut row = vec![BigInt::one(); n + 1];
            for k in 1..n {
                row[k] = &binom[n - 1][k - 1] + &binom[n - 1][k];
            }
            binom.push(row);
        }

        let mut stirling: Vec<Vec<BigInt>> = Vec::with_capacity(max + 1);
        stirling.push(vec![BigInt::one()]);
        for s in 1..=max {
            let prev = &stirling[s - 1];
            let mut row = vec![BigInt::zero(); s + 1];
            for k in 1..=s {
                let stay = if k < s { prev[k].clone() * k } else { BigInt::zero() };
                row[k] = stay + &prev[k - 1];
            }
            stirling.push(row);
        }
        CombTable { binom, stirling }
    }

    pub fn max(&self) -> usize {
        self.binom.len() - 1
    }

    /// `C(n, k)`, zero when `k > n`.
    pub fn binomial(&self, n: usize, k: usize) -> BigInt {
        if k > n {
            return BigInt::zero();
        }
        match self.binom.get(n) {
            Some(row) => row[k].clone(),
            None => binomial_direct(n, k),
        }
    }

    /// Partitions of an `s`-set into `k` non-empty blocks.
    pub fn stirling2(&self, s: usize, k: usize) -> BigInt {
        if k > s {
            return BigInt::zero();
        }
        match self.stirling.get(s) {
            Some(row) => row[k].clone(),
            None => stirling2_direct(s, k),
        }
    }
}

fn shared() -> &'static CombTable {
    static TABLE: OnceLock<CombTable> = OnceLock::new();
    TABLE.get_or_init(|| CombTable::new(64))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    shared().binomial(n, k)
}

pub fn stirling2(s: usize, k: usize) -> BigInt {
    shared().stirling2(s, k)
}

/// Stirling weight used when counting flags: identical to [`stirling2`]
/// except that `{s over 0}` is taken to be 1 for every `s`.
pub fn stirling2_flag(s: usize, k: usize) -> BigInt {
    if k == 0 {
        BigInt::one()
    } else {
        stirling2(s, k)
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn binomial_direct(n: usize, k: usize) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn stirling2_direct(s: usize, k: usize) -> BigInt {
    let mut row = vec![BigInt::zero(); k + 1];
    row[0] = BigInt::one();
    for i in 1..=s {
        for j in (1..=k.min(i)).rev() {
            row[j] = &row[j] * j + &row[j - 1];
        }
        row[0] = BigInt::zero();
    }
    row[k].clone()
}

/// `sum_{k=1}^{s} (-1)^k k! S(s,k)`; equals `(-1)^s` for every `s >= 1`.
pub fn signed_ordered_partition_sum(s: usize) -> BigInt {
    (1..=s)
        .map(|k| {
            let term = factorial(k) * stirling2(s, k);
            if k % 2 == 1 {
                -term
            } else {
                term
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Set partitions of `{0..s}` into exactly `k` blocks, by brute force
    /// over restricted growth strings.
    fn count_partitions(s: usize, k: usize) -> u64 {
        fn go(pos: usize, s: usize, used: usize, k: usize) -> u64 {
            if pos == s {
                return u64::from(used == k);
            }
            let mut total = 0;
            for block in 0..=used.min(k.saturating_sub(1)) {
                let next_used = if block == used { used + 1 } else { used };
                if next_used <= k {
                    total += go(pos + 1, s, next_used, k);
                }
            }
            total
        }
        go(0, s, 0, k)
    }

    #[test]
    fn stirling_small_values() {
        assert_eq!(stirling2(3, 2), BigInt::from(3));
        assert_eq!(count_partitions(3, 2), 3);
        assert_eq!(stirling2(0, 0), BigInt::one());
        for s in 1..10 {
            assert_eq!(stirling2(s, 1), BigInt::one());
            assert_eq!(stirling2(s, 0), BigInt::zero());
            assert_eq!(stirling2_flag(s, 0), BigInt::one());
        }
    }

    #[test]
    fn stirling_matches_enumeration() {
        for s in 0..=8 {
            for k in 0..=s {
                assert_eq!(stirling2(s, k), BigInt::from(count_partitions(s, k)), "S({s},{k})");
            }
        }
    }

    #[test]
    fn table_and_direct_paths_agree() {
        let small = CombTable::new(5);
        for n in 0..12 {
            for k in 0..=n {
                assert_eq!(small.binomial(n, k), binomial(n, k));
                assert_eq!(small.stirling2(n, k), stirling2(n, k));
            }
        }
        assert_eq!(binomial(70, 35), binomial_direct(70, 35));
        assert_eq!(stirling2(70, 3), stirling2_direct(70, 3));
    }

    #[test]
    fn pascal_rule() {
        for n in 1..30 {
            for k in 1..n {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }

    #[test]
    fn alternating_ordered_partition_sum() {
        for s in 1..=12 {
            let expected = if s % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            assert_eq!(signed_ordered_partition_sum(s), expected, "s = {s}");
        }
    }
}
