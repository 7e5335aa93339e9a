//! Multiplicative functions evaluated from a factorization.

use super::Factorization;

/// Euler's totient, `prod p^(a-1) (p - 1)`.
pub fn euler_phi(f: &Factorization) -> u128 {
    product_over_factors(f, 1)
}

/// Schemmel's totient `S2(n) = n prod (1 - 2/p)`, i.e. `prod p^(a-1) (p - 2)`.
///
/// Zero whenever `n` is even; one for `n = 1`.
pub fn schemmel_s2(f: &Factorization) -> u128 {
    product_over_factors(f, 2)
}

/// Number of distinct prime divisors.
pub fn omega(f: &Factorization) -> usize {
    f.factors().len()
}

pub fn is_squarefree(f: &Factorization) -> bool {
    f.factors().iter().all(|pp| pp.exponent == 1)
}

// prod p^(a-1) (p - shift); every partial product is bounded by f.value().
fn product_over_factors(f: &Factorization, shift: u64) -> u128 {
    f.factors().iter().fold(1u128, |acc, pp| {
        let p = pp.prime as u128;
        let mut term = p - shift as u128;
        for _ in 1..pp.exponent {
            term = term
                .checked_mul(p)
                .expect("term bounded by the factorization value");
        }
        acc.checked_mul(term)
            .expect("product bounded by the factorization value")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;

    fn phi_by_counting(n: u64) -> u128 {
        (1..=n).filter(|&a| num_integer::gcd(a, n) == 1).count() as u128
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(&factorize(1).unwrap()), 1);
        assert_eq!(euler_phi(&factorize(10).unwrap()), 4);
        assert_eq!(phi_by_counting(561), 320);
        assert_eq!(euler_phi(&factorize(561).unwrap()), 320);
    }

    #[test]
    fn phi_matches_counting() {
        for n in 1..3000 {
            assert_eq!(
                euler_phi(&factorize(n).unwrap()),
                phi_by_counting(n),
                "n = {n}"
            );
        }
    }

    #[test]
    fn s2_examples() {
        assert_eq!(schemmel_s2(&factorize(7).unwrap()), 5);
        assert_eq!(schemmel_s2(&factorize(12).unwrap()), 0);
        assert_eq!(schemmel_s2(&factorize(15).unwrap()), 3);
        assert_eq!(schemmel_s2(&factorize(9).unwrap()), 3);
        assert_eq!(schemmel_s2(&factorize(1).unwrap()), 1);
        assert_eq!(schemmel_s2(&factorize(2).unwrap()), 0);
    }

    #[test]
    fn omega_and_squarefree() {
        assert_eq!(omega(&factorize(1).unwrap()), 0);
        assert_eq!(omega(&factorize(12).unwrap()), 2);
        assert_eq!(omega(&factorize(255_255).unwrap()), 6);
        assert!(is_squarefree(&factorize(15).unwrap()));
        assert!(!is_squarefree(&factorize(9).unwrap()));
        assert!(is_squarefree(&factorize(1).unwrap()));
    }

    #[test]
    fn values_beyond_64_bits() {
        let f = Factorization::from_primes(&[
            3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
        ])
        .unwrap();
        assert!(f.value() > u64::MAX as u128);
        let phi: u128 = [
            3u128, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
        ]
        .iter()
        .map(|p| p - 1)
        .product();
        assert_eq!(euler_phi(&f), phi);
    }
}
