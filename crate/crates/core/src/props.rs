//! Lehmer and Deaconescu predicates.
//!
//! A composite `n` is a Deaconescu number when `M * S2(n) = phi(n) - 1` for
//! some integer `M`, and a Lehmer number when `phi(n) | n - 1`. Neither kind
//! is known to exist; every check here is expected to come back negative
//! for composites.

use serde::{Deserialize, Serialize};

use crate::arith::{
    euler_phi, factorize, is_squarefree, omega, schemmel_s2, Factorization, TotientTable,
};
use crate::{Budget, Error, Result};

/// `d | x`, with zero dividing only zero.
pub fn divides(d: u128, x: u128) -> bool {
    if d == 0 {
        x == 0
    } else {
        x % d == 0
    }
}

/// `(phi - 1) / s2` when `s2 > 0` divides `phi - 1`.
///
/// `n = 2` has `s2 = 0 = phi - 1`, so every `M` satisfies the equation and
/// no quotient is defined; it gets `None` like every other even `n`.
pub fn multiplier_from_values(phi: u128, s2: u128) -> Option<u128> {
    let target = phi.checked_sub(1)?;
    (s2 > 0 && divides(s2, target)).then(|| target / s2)
}

/// Whether `m * S2(n) = phi(n) - 1` holds for the given `m`.
pub fn satisfies_multiplier(n: u64, m: u128) -> Result<bool> {
    let f = factorize(n)?;
    let (phi, s2) = (euler_phi(&f), schemmel_s2(&f));
    Ok(phi >= 1 && m.checked_mul(s2) == Some(phi - 1))
}

fn require_at_least_two(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

/// The multiplier `M` of `M * S2(n) = phi(n) - 1`, if it exists.
pub fn deaconescu_multiplier(n: u64) -> Result<Option<u128>> {
    require_at_least_two(n)?;
    let f = factorize(n)?;
    Ok(multiplier_from_values(euler_phi(&f), schemmel_s2(&f)))
}

pub fn is_deaconescu_number(n: u64) -> Result<bool> {
    Ok(ClassificationRecord::for_n(n)?.is_deaconescu)
}

pub fn is_lehmer_number(n: u64) -> Result<bool> {
    Ok(ClassificationRecord::for_n(n)?.is_lehmer)
}

/// Per-`n` verdict, serialized as one JSON object per line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub n: u128,
    pub phi: u128,
    pub s2: u128,
    pub is_prime: bool,
    pub is_lehmer: bool,
    pub is_deaconescu: bool,
    pub multiplier: Option<u128>,
}

impl ClassificationRecord {
    pub fn for_n(n: u64) -> Result<Self> {
        require_at_least_two(n)?;
        Ok(Self::from_factorization(&factorize(n)?))
    }

    /// Classifies the value of `f`; the value must be at least 2.
    pub fn from_factorization(f: &Factorization) -> Self {
        Self::from_values(f.value(), euler_phi(f), schemmel_s2(f), f.is_prime())
    }

    /// Builds a record from precomputed totients, e.g. out of a sieve.
    pub fn from_values(n: u128, phi: u128, s2: u128, is_prime: bool) -> Self {
        let composite = n >= 2 && !is_prime;
        let multiplier = if n >= 2 {
            multiplier_from_values(phi, s2)
        } else {
            None
        };
        ClassificationRecord {
            n,
            phi,
            s2,
            is_prime,
            is_lehmer: composite && divides(phi, n - 1),
            is_deaconescu: composite && multiplier.is_some(),
            multiplier,
        }
    }

    /// A composite satisfying either divisibility.
    pub fn is_witness(&self) -> bool {
        self.is_deaconescu || self.is_lehmer
    }
}

/// Which necessary conditions for a Deaconescu number `n` violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub n: u128,
    pub fails_odd: bool,
    pub fails_squarefree: bool,
    pub fails_omega7: bool,
    pub passes_all: bool,
}

/// Smallest number of distinct prime factors a Deaconescu number can have.
pub const MIN_DEACONESCU_OMEGA: usize = 7;

pub fn structural_filter(f: &Factorization) -> FilterVerdict {
    let fails_odd = !f.is_odd();
    let fails_squarefree = !is_squarefree(f);
    let fails_omega7 = omega(f) < MIN_DEACONESCU_OMEGA;
    FilterVerdict {
        n: f.value(),
        fails_odd,
        fails_squarefree,
        fails_omega7,
        passes_all: !(fails_odd || fails_squarefree || fails_omega7),
    }
}

/// Outcome of scanning `2..=limit` for members of `D_1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitMultiplierReport {
    pub limit: u64,
    pub primes_checked: u64,
    /// Composites with `S2(n) = phi(n) - 1`. Expected empty.
    pub composite_violations: Vec<u64>,
    /// Primes for which `1 * S2(p) = phi(p) - 1` fails. Expected empty.
    pub prime_violations: Vec<u64>,
}

impl UnitMultiplierReport {
    pub fn holds(&self) -> bool {
        self.composite_violations.is_empty() && self.prime_violations.is_empty()
    }
}

/// Checks that exactly the primes `<= limit` satisfy the equation with `M = 1`.
pub fn check_d1_is_primes(limit: u64) -> Result<UnitMultiplierReport> {
    check_d1_is_primes_with_budget(limit, &Budget::default())
}

pub fn check_d1_is_primes_with_budget(limit: u64, budget: &Budget) -> Result<UnitMultiplierReport> {
    require_at_least_two(limit)?;
    let table = TotientTable::build_with_budget(limit, budget)?;
    let mut report = UnitMultiplierReport {
        limit,
        ..Default::default()
    };
    for n in 2..=limit {
        // M = 1 means S2(n) = phi(n) - 1 exactly; this covers n = 2 too.
        let unit = table.s2(n) + 1 == table.phi(n);
        if table.is_prime(n) {
            report.primes_checked += 1;
            if !unit {
                report.prime_violations.push(n);
            }
        } else if unit {
            report.composite_violations.push(n);
        }
    }
    Ok(report)
}
