//! Whole-range evaluation of `phi` and `S2` without per-`n` factorization.
//!
//! [`TotientTable`] is a linear (Euler) sieve over `1..=limit` that records
//! the smallest prime factor of each `n`. Both totients have the form
//! `n * prod g(p)`, so for a prime `p <= spf(i)`:
//!
//! ```text
//! f(i * p) = f(i) * p          if p | i
//! f(i * p) = f(i) * f(p)       otherwise
//! ```
//!
//! [`TotientSegment`] covers an arbitrary window `[lo, hi]` by dividing out
//! every base prime up to `sqrt(hi)`; it is the unit of work for parallel
//! and resumable scans.

use crate::{Budget, Error, Result};

/// `phi`, `S2` and smallest prime factor for every `n <= limit`.
#[derive(Clone, Debug)]
pub struct TotientTable {
    spf: Vec<u32>,
    phi: Vec<u32>,
    s2: Vec<u32>,
    primes: Vec<u32>,
}

impl TotientTable {
    /// Bytes of table storage per entry.
    pub const BYTES_PER_ENTRY: u64 = 12;

    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with_budget(limit, &Budget::default())
    }

    pub fn build_with_budget(limit: u64, budget: &Budget) -> Result<Self> {
        if limit >= u32::MAX as u64 {
            return Err(Error::BudgetExceeded {
                what: "totient table range",
                requested: limit as u128,
                limit: u32::MAX as u128 - 1,
            });
        }
        budget.check_memory(
            "totient table memory",
            (limit as u128 + 1) * Self::BYTES_PER_ENTRY as u128,
        )?;
        let len = limit as usize + 1;
        let mut spf = vec![0u32; len];
        let mut phi = vec![0u32; len];
        let mut s2 = vec![0u32; len];
        let mut primes: Vec<u32> = Vec::new();
        if len > 1 {
            phi[1] = 1;
            s2[1] = 1;
        }
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                phi[i] = i as u32 - 1;
                s2[i] = i as u32 - 2;
                primes.push(i as u32);
            }
            let lpf = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > lpf || m >= len {
                    break;
                }
                spf[m] = p;
                if p == lpf {
                    phi[m] = phi[i] * p;
                    s2[m] = s2[i] * p;
                } else {
                    phi[m] = phi[i] * (p - 1);
                    s2[m] = s2[i] * (p - 2);
                }
            }
        }
        Ok(TotientTable {
            spf,
            phi,
            s2,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.spf.len().saturating_sub(1) as u64
    }

    pub fn phi(&self, n: u64) -> u64 {
        self.phi[n as usize] as u64
    }

    pub fn s2(&self, n: u64) -> u64 {
        self.s2[n as usize] as u64
    }

    /// Smallest prime factor, `0` for `n < 2`.
    pub fn smallest_prime_factor(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }
}

/// `phi`, `S2` and primality for every `n` in `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct TotientSegment {
    lo: u64,
    phi: Vec<u64>,
    s2: Vec<u64>,
    composite: Vec<bool>,
}

impl TotientSegment {
    /// Sieves its own base primes.
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        let base = super::sieve_primes(hi.isqrt())?;
        Self::compute(lo, hi, &base)
    }

    /// `base_primes` must be ascending and contain every prime `<= sqrt(hi)`;
    /// a shorter list silently yields wrong values.
    pub fn compute(lo: u64, hi: u64, base_primes: &[u64]) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::invalid(format!("bad segment [{lo}, {hi}]")));
        }
        let len = usize::try_from(hi - lo + 1).map_err(|_| Error::Overflow("segment length"))?;
        let mut rest: Vec<u64> = (lo..=hi).collect();
        let mut phi = vec![1u64; len];
        let mut s2 = vec![1u64; len];
        let mut composite = vec![false; len];

        for &p in base_primes {
            if p.saturating_mul(p) > hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut m = first;
            while m <= hi {
                let i = (m - lo) as usize;
                if m != p {
                    composite[i] = true;
                }
                let mut pk = 1u64;
                while rest[i] % p == 0 {
                    rest[i] /= p;
                    pk *= p;
                }
                let tail = pk / p;
                phi[i] *= tail * (p - 1);
                s2[i] *= tail * (p - 2);
                m = match m.checked_add(p) {
                    Some(next) => next,
                    None => break,
                };
            }
        }
        for i in 0..len {
            let q = rest[i];
            if q > 1 {
                // the one prime factor above sqrt(hi)
                phi[i] *= q - 1;
                s2[i] *= q - 2;
                if q != lo + i as u64 {
                    composite[i] = true;
                }
            }
        }
        Ok(TotientSegment {
            lo,
            phi,
            s2,
            composite,
        })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.lo + self.phi.len() as u64 - 1
    }

    pub fn phi(&self, n: u64) -> u64 {
        self.phi[(n - self.lo) as usize]
    }

    pub fn s2(&self, n: u64) -> u64 {
        self.s2[(n - self.lo) as usize]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && !self.composite[(n - self.lo) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{euler_phi, factorize, is_prime, schemmel_s2, sieve_primes};

    #[test]
    fn table_matches_factorization() {
        let table = TotientTable::build(20_000).unwrap();
        assert_eq!(table.limit(), 20_000);
        for n in 1..=20_000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(table.phi(n) as u128, euler_phi(&f), "phi({n})");
            assert_eq!(table.s2(n) as u128, schemmel_s2(&f), "s2({n})");
            assert_eq!(table.is_prime(n), is_prime(n), "prime({n})");
        }
        assert_eq!(table.primes().len(), 2262);
    }

    #[test]
    fn tiny_tables() {
        let t = TotientTable::build(0).unwrap();
        assert_eq!(t.limit(), 0);
        let t = TotientTable::build(1).unwrap();
        assert_eq!((t.phi(1), t.s2(1)), (1, 1));
        assert!(!t.is_prime(1));
        let t = TotientTable::build(2).unwrap();
        assert_eq!((t.phi(2), t.s2(2)), (1, 0));
        assert!(t.is_prime(2));
    }

    #[test]
    fn table_respects_budget() {
        let budget = Budget {
            memory_bytes: 1200,
            ..Budget::default()
        };
        assert!(TotientTable::build_with_budget(99, &budget).is_ok());
        assert!(TotientTable::build_with_budget(100, &budget).is_err());
    }

    #[test]
    fn segment_matches_table() {
        let table = TotientTable::build(50_000).unwrap();
        let base = sieve_primes(250).unwrap();
        for (lo, hi) in [
            (1u64, 1u64),
            (1, 100),
            (2, 2),
            (97, 97),
            (30_000, 50_000),
            (49_999, 50_000),
        ] {
            let seg = TotientSegment::compute(lo, hi, &base).unwrap();
            assert_eq!((seg.lo(), seg.hi()), (lo, hi));
            for n in lo..=hi {
                assert_eq!(seg.phi(n), table.phi(n), "phi({n})");
                assert_eq!(seg.s2(n), table.s2(n), "s2({n})");
                assert_eq!(seg.is_prime(n), table.is_prime(n), "prime({n})");
            }
        }
    }

    #[test]
    fn segment_far_from_origin() {
        let lo = 1_000_000_000_000u64;
        let base = sieve_primes(1_000_100).unwrap();
        let seg = TotientSegment::compute(lo, lo + 500, &base).unwrap();
        for n in lo..=lo + 500 {
            let f = factorize(n).unwrap();
            assert_eq!(seg.phi(n) as u128, euler_phi(&f));
            assert_eq!(seg.s2(n) as u128, schemmel_s2(&f));
            assert_eq!(seg.is_prime(n), is_prime(n));
        }
    }

    #[test]
    fn segment_bounds() {
        let seg = TotientSegment::new(1, 24).unwrap();
        assert_eq!((seg.phi(24), seg.s2(21)), (8, 5));
        assert!(TotientSegment::compute(5, 4, &[2]).is_err());
        assert!(TotientSegment::compute(0, 4, &[2]).is_err());
    }
}
