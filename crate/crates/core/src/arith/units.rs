//! Exceptional units of `Z/nZ`: residues `a` with `a` and `a - 1` both units.

use crate::{Budget, Error, Result};

/// The exceptional units modulo `modulus`, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalUnitSet {
    modulus: u64,
    members: Vec<u64>,
}

impl ExceptionalUnitSet {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: u64) -> bool {
        self.members.binary_search(&a).is_ok()
    }
}

fn check_modulus(n: u64, budget: &Budget) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("modulus must be at least 1"));
    }
    if n > budget.brute_force_limit {
        return Err(Error::BudgetExceeded {
            what: "exceptional-unit brute force",
            requested: n as u128,
            limit: budget.brute_force_limit as u128,
        });
    }
    Ok(())
}

/// Scans every residue `0..n` and keeps those with `gcd(a, n) = 1` and
/// `gcd(a - 1, n) = 1`, using `gcd(0, n) = n`.
pub fn exceptional_units(n: u64) -> Result<ExceptionalUnitSet> {
    exceptional_units_with_budget(n, &Budget::default())
}

pub fn exceptional_units_with_budget(n: u64, budget: &Budget) -> Result<ExceptionalUnitSet> {
    check_modulus(n, budget)?;
    let members = (0..n)
        .filter(|&a| {
            let prev = (a + n - 1) % n;
            num_integer::gcd(a, n) == 1 && num_integer::gcd(prev, n) == 1
        })
        .collect();
    Ok(ExceptionalUnitSet {
        modulus: n,
        members,
    })
}

/// `|exceptional_units(n)|` without materializing the set.
///
/// Marks every residue sharing a prime with `n` (primes found by plain
/// trial division of `n`), then counts residues `a` with both `a` and
/// `a - 1` unmarked. Equivalent to the gcd scan, and fast enough to run
/// over every modulus up to `10^5`.
pub fn count_exceptional(n: u64) -> Result<u64> {
    count_exceptional_with_budget(n, &Budget::default())
}

pub fn count_exceptional_with_budget(n: u64, budget: &Budget) -> Result<u64> {
    check_modulus(n, budget)?;
    let len = n as usize;
    let mut shares_prime = vec![false; len];
    let mut rest = n;
    let mut d = 2;
    while rest > 1 {
        if d * d > rest {
            d = rest;
        }
        if rest % d == 0 {
            while rest % d == 0 {
                rest /= d;
            }
            for slot in shares_prime.iter_mut().step_by(d as usize) {
                *slot = true;
            }
        }
        d += 1;
    }
    if n == 1 {
        // Z/1Z: the single residue 0 is a unit, and so is 0 - 1 = 0.
        return Ok(1);
    }
    let mut count = u64::from(!shares_prime[0] && !shares_prime[len - 1]);
    count += shares_prime.windows(2).filter(|w| !w[0] && !w[1]).count() as u64;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_examples() {
        assert_eq!(exceptional_units(15).unwrap().members(), &[2, 8, 14]);
        assert!(exceptional_units(2).unwrap().is_empty());
        assert_eq!(exceptional_units(7).unwrap().members(), &[2, 3, 4, 5, 6]);
        assert_eq!(exceptional_units(1).unwrap().members(), &[0]);
        assert_eq!(count_exceptional(15).unwrap(), 3);
        assert_eq!(count_exceptional(1).unwrap(), 1);
        assert_eq!(count_exceptional(9).unwrap(), 3);
    }

    #[test]
    fn members_satisfy_definition() {
        for n in 1..200u64 {
            let set = exceptional_units(n).unwrap();
            for &a in set.members() {
                assert_eq!(num_integer::gcd(a, n), 1);
                assert_eq!(num_integer::gcd((a + n - 1) % n, n), 1);
            }
        }
    }

    #[test]
    fn counting_agrees_with_gcd_scan() {
        for n in 1..3000u64 {
            assert_eq!(
                count_exceptional(n).unwrap(),
                exceptional_units(n).unwrap().len() as u64,
                "n = {n}"
            );
        }
    }

    #[test]
    fn budget_and_zero() {
        assert!(matches!(exceptional_units(0), Err(Error::InvalidInput(_))));
        let budget = Budget {
            brute_force_limit: 100,
            ..Budget::default()
        };
        assert!(count_exceptional_with_budget(100, &budget).is_ok());
        assert!(matches!(
            count_exceptional_with_budget(101, &budget),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(
            exceptional_units(Budget::DEFAULT_BRUTE_FORCE_LIMIT + 1),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
