//! Prime generation and deterministic 64-bit primality.

use std::sync::OnceLock;

use crate::{Budget, Error, Result};

/// Primes below this bound are produced once and used for trial division.
pub const TRIAL_DIVISION_BOUND: u64 = 1 << 16;

/// All primes `<= limit`, ascending, under the default memory budget.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    sieve_primes_with_budget(limit, &Budget::default())
}

/// Odd-only sieve of Eratosthenes; one byte per odd number up to `limit`.
pub fn sieve_primes_with_budget(limit: u64, budget: &Budget) -> Result<Vec<u64>> {
    if limit < 2 {
        return Ok(Vec::new());
    }
    let slots = (limit - 1) / 2; // odd numbers 3, 5, ..., <= limit
    budget.check_memory("sieve memory", slots as u128 + 1)?;
    let slots = usize::try_from(slots).map_err(|_| Error::Overflow("sieve size"))?;

    let mut composite = vec![false; slots];
    let mut i = 0usize;
    loop {
        let p = 2 * i as u64 + 3;
        if p.saturating_mul(p) > limit {
            break;
        }
        if !composite[i] {
            let mut j = ((p * p - 3) / 2) as usize;
            while j < slots {
                composite[j] = true;
                j += p as usize;
            }
        }
        i += 1;
    }

    let mut primes = Vec::with_capacity(estimate_prime_count(limit));
    primes.push(2);
    primes.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| 2 * i as u64 + 3),
    );
    Ok(primes)
}

fn estimate_prime_count(limit: u64) -> usize {
    let x = limit as f64;
    (1.3 * x / x.ln().max(1.0)) as usize + 8
}

/// Primes below [`TRIAL_DIVISION_BOUND`], computed on first use.
pub fn small_primes() -> &'static [u64] {
    static SMALL: OnceLock<Vec<u64>> = OnceLock::new();
    SMALL.get_or_init(|| {
        sieve_primes(TRIAL_DIVISION_BOUND - 1).expect("small sieve fits every budget")
    })
}

/// The first `count` odd primes (3, 5, 7, ...).
pub fn first_odd_primes(count: usize) -> Vec<u64> {
    let mut limit = 64u64;
    loop {
        let primes = sieve_primes(limit).expect("odd prime prefix fits the default budget");
        if primes.len() > count {
            return primes[1..=count].to_vec();
        }
        limit *= 2;
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

// These bases make Miller-Rabin deterministic for every n < 3.3 * 10^24.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn sieve_small_cases() {
        assert_eq!(sieve_primes(10).unwrap(), vec![2, 3, 5, 7]);
        assert!(sieve_primes(1).unwrap().is_empty());
        assert!(sieve_primes(0).unwrap().is_empty());
        assert_eq!(sieve_primes(2).unwrap(), vec![2]);
        assert_eq!(sieve_primes(3).unwrap(), vec![2, 3]);
    }

    #[test]
    fn sieve_hundred_matches_trial_division() {
        let oracle: Vec<u64> = (0..=100).filter(|&n| trial_division_is_prime(n)).collect();
        assert_eq!(oracle.len(), 25);
        assert_eq!(sieve_primes(100).unwrap(), oracle);
    }

    #[test]
    fn sieve_respects_memory_budget() {
        let budget = Budget {
            memory_bytes: 1000,
            ..Budget::default()
        };
        assert!(sieve_primes_with_budget(1000, &budget).is_ok());
        assert!(matches!(
            sieve_primes_with_budget(10_000, &budget),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let primes = sieve_primes(200_000).unwrap();
        let mut next = primes.iter().peekable();
        for n in 0..=200_000u64 {
            let expected = next.peek() == Some(&&n);
            if expected {
                next.next();
            }
            assert_eq!(is_prime(n), expected, "n = {n}");
        }
    }

    #[test]
    fn miller_rabin_rejects_pseudoprimes() {
        // Carmichael numbers and strong pseudoprimes to the first few bases.
        for n in [561u64, 41_041, 3_215_031_751, 3_825_123_056_546_413_051] {
            assert!(!is_prime(n), "n = {n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557)); // largest 64-bit prime
        assert!(!is_prime(u64::MAX));
        assert!(!is_prime(4_294_967_291 * 4_294_967_279));
    }

    #[test]
    fn first_odd_primes_prefix() {
        assert_eq!(first_odd_primes(6), vec![3, 5, 7, 11, 13, 17]);
        assert_eq!(first_odd_primes(0), Vec::<u64>::new());
    }
}
