//! Canonical prime-power decomposition.
//!
//! `factorize` trial-divides by the primes below
//! [`TRIAL_DIVISION_BOUND`](super::TRIAL_DIVISION_BOUND) and hands whatever
//! cofactor remains to Brent's variant of Pollard's rho. The rho walk is
//! seeded from the cofactor itself, so results never depend on run order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::primes::{is_prime, mul_mod, small_primes, TRIAL_DIVISION_BOUND};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

/// `value = prod prime^exponent` with primes strictly increasing.
///
/// Values are carried as `u128` so that products of several 64-bit primes
/// (as built by the tuple search) keep an exact representation. Only
/// [`factorize`] is limited to 64-bit inputs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    value: u128,
    factors: Vec<PrimePower>,
}

impl Factorization {
    /// The factorization of 1.
    pub fn one() -> Self {
        Factorization {
            value: 1,
            factors: Vec::new(),
        }
    }

    /// Validates and multiplies out a list of prime powers.
    pub fn from_prime_powers<I>(powers: I) -> Result<Self>
    where
        I: IntoIterator<Item = PrimePower>,
    {
        let mut value: u128 = 1;
        let mut factors: Vec<PrimePower> = Vec::new();
        for pp in powers {
            if pp.exponent == 0 {
                return Err(Error::invalid(format!(
                    "zero exponent for prime {}",
                    pp.prime
                )));
            }
            if let Some(last) = factors.last() {
                if pp.prime <= last.prime {
                    return Err(Error::invalid("primes must be strictly increasing"));
                }
            }
            if !is_prime(pp.prime) {
                return Err(Error::invalid(format!("{} is not prime", pp.prime)));
            }
            for _ in 0..pp.exponent {
                value = value
                    .checked_mul(pp.prime as u128)
                    .ok_or(Error::Overflow("factorization value"))?;
            }
            factors.push(pp);
        }
        Ok(Factorization { value, factors })
    }

    /// Squarefree factorization from strictly increasing primes.
    pub fn from_primes(primes: &[u64]) -> Result<Self> {
        Self::from_prime_powers(
            primes
                .iter()
                .map(|&prime| PrimePower { prime, exponent: 1 }),
        )
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|pp| pp.prime)
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|pp| pp.prime)
    }

    pub fn is_prime(&self) -> bool {
        matches!(self.factors.as_slice(), [PrimePower { exponent: 1, .. }])
    }

    pub fn is_odd(&self) -> bool {
        self.value % 2 == 1
    }
}

/// Factorizes `n >= 1`. Rejects zero.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::invalid("cannot factorize 0"));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    for &p in small_primes() {
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut exponent = 0;
            while rest % p == 0 {
                rest /= p;
                exponent += 1;
            }
            factors.push(PrimePower { prime: p, exponent });
        }
    }
    if rest > 1 {
        let mut large = Vec::new();
        split_cofactor(rest, &mut large);
        large.sort_unstable();
        for p in large {
            match factors.last_mut() {
                Some(last) if last.prime == p => last.exponent += 1,
                _ => factors.push(PrimePower {
                    prime: p,
                    exponent: 1,
                }),
            }
        }
    }
    Ok(Factorization {
        value: n as u128,
        factors,
    })
}

// `n` has no prime factor below TRIAL_DIVISION_BOUND (or is itself prime).
fn split_cofactor(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if n < TRIAL_DIVISION_BOUND * TRIAL_DIVISION_BOUND || is_prime(n) {
        out.push(n);
        return;
    }
    let d = find_divisor(n);
    split_cofactor(d, out);
    split_cofactor(n / d, out);
}

/// Brent's cycle-finding rho on `x -> x^2 + c`. `n` must be odd and composite.
fn find_divisor(n: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(n ^ 0x5eed_d1ce_0f5c_4ee1);
    const BATCH: u64 = 128;
    loop {
        let c = rng.gen_range(1..n);
        let mut y = rng.gen_range(0..n);
        let step = |v: u64| ((mul_mod(v, v, n) as u128 + c as u128) % n as u128) as u64;
        let mut g = 1;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = step(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = num_integer::gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            // The batched product overshot; retrace one step at a time.
            loop {
                ys = step(ys);
                g = num_integer::gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
}
