//! Exact replication of the inequalities behind the non-existence results.
//!
//! No floating point is used anywhere below: ratio products are
//! [`ExactRational`]s and the doubly exponential bounds are [`BigNat`]s.

mod rational;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    euler_phi, first_odd_primes, is_prime, is_squarefree, schemmel_s2, Factorization,
};
use crate::props::divides;
use crate::{Budget, Error, Result};

pub use rational::ExactRational;

/// Arbitrary-precision natural number.
pub type BigNat = BigUint;

/// Names of the public checks in this module, used by the verification
/// suites to account for coverage.
pub const OPERATIONS: [&str; 10] = [
    "ratio_phi_over_s2",
    "q_product",
    "skip3_product",
    "omega2_scan",
    "mod3_obstruction_check",
    "nielsen_precondition",
    "nielsen_bound",
    "verify_nielsen_instance",
    "deaconescu_upper_bound",
    "theorem13_residue",
];

/// `(p - 1) / (p - 2)` for an odd prime `p`.
pub fn unit_ratio_factor(p: u64) -> Result<ExactRational> {
    if p < 3 {
        return Err(Error::invalid(format!("ratio factor undefined at p = {p}")));
    }
    ExactRational::new(p - 1, p - 2)
}

/// `phi(n) / S2(n) = prod (p - 1)/(p - 2)` for odd squarefree `n`.
pub fn ratio_phi_over_s2(f: &Factorization) -> Result<ExactRational> {
    if !f.is_odd() || !is_squarefree(f) {
        return Err(Error::invalid(format!(
            "phi/S2 ratio needs odd squarefree n, got {}",
            f.value()
        )));
    }
    f.primes().map(unit_ratio_factor).product()
}

/// Strict form of `phi(n)/S2(n) > M`; equality fails.
pub fn ratio_exceeds_multiplier(f: &Factorization, m: u64) -> Result<bool> {
    Ok(ratio_phi_over_s2(f)? > ExactRational::from_integer(m))
}

/// `Q_r`: the ratio product over the first `r` odd primes, the largest
/// `phi/S2` any odd `n` with `r` prime factors can reach.
pub fn q_product(r: usize) -> Result<ExactRational> {
    if r == 0 {
        return Err(Error::invalid("q_product needs r >= 1"));
    }
    first_odd_primes(r)
        .into_iter()
        .map(unit_ratio_factor)
        .product()
}

/// Ratio product over `r` consecutive odd primes starting at 5: the
/// largest `phi/S2` when `3` does not divide `n`.
pub fn skip3_product(r: usize) -> Result<ExactRational> {
    if r == 0 {
        return Err(Error::invalid("skip3_product needs r >= 1"));
    }
    first_odd_primes(r + 1)[1..]
        .iter()
        .map(|&p| unit_ratio_factor(p))
        .product()
}

/// A pair of odd primes with `M (p1 - 2)(p2 - 2) = (p1 - 1)(p2 - 1) - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Omega2Solution {
    pub p1: u64,
    pub p2: u64,
    pub m: u64,
}

/// All odd prime pairs `p1 < p2 <= prime_limit` solving the two-prime
/// equation with an odd integer `M >= 3`. Expected empty.
pub fn omega2_scan(prime_limit: u64) -> Result<Vec<Omega2Solution>> {
    if prime_limit < 5 {
        return Err(Error::invalid("omega2_scan needs prime_limit >= 5"));
    }
    let primes = crate::arith::sieve_primes(prime_limit)?;
    let odd = &primes[1..];
    let mut found = Vec::new();
    for (i, &p1) in odd.iter().enumerate() {
        for &p2 in &odd[i + 1..] {
            let s2 = (p1 as u128 - 2) * (p2 as u128 - 2);
            let target = (p1 as u128 - 1) * (p2 as u128 - 1) - 1;
            if divides(s2, target) {
                let m = target / s2;
                if m >= 3 && m % 2 == 1 {
                    found.push(Omega2Solution {
                        p1,
                        p2,
                        m: m as u64,
                    });
                }
            }
        }
    }
    Ok(found)
}

/// For `n = 3 * p2 * ... * pr` with `M = 3`, the equation reads
/// `3 prod (p - 2) = 2 prod (p - 1) - 1`. Returns `true` when that is
/// impossible modulo 3 for the given primes (all `>= 5`), i.e. when
/// `prod (p - 1)` is not `2 mod 3`.
pub fn mod3_obstruction_check(primes: &[u64]) -> Result<bool> {
    let mut seen = std::collections::BTreeSet::new();
    for &p in primes {
        if p < 5 || !is_prime(p) {
            return Err(Error::invalid(format!(
                "mod-3 check needs primes >= 5, got {p}"
            )));
        }
        if !seen.insert(p) {
            return Err(Error::invalid(format!("repeated prime {p}")));
        }
    }
    let residue = primes.iter().fold(1u64, |acc, &p| acc * ((p - 1) % 3) % 3);
    // 3 * prod(p - 2) is 0 mod 3, so a solution needs 2 * residue - 1 = 0 mod 3.
    Ok((2 * residue + 2) % 3 != 0)
}

/// The hypothesis of Nielsen's inequality:
/// `prod_{j<=r} (1 - 1/x_j) <= a/b < prod_{j<r} (1 - 1/x_j)`, with the empty
/// product equal to 1.
pub fn nielsen_precondition(xs: &[u64], a: u128, b: u128) -> Result<bool> {
    check_nielsen_xs(xs)?;
    if a == 0 || b == 0 {
        return Err(Error::invalid("a and b must be positive"));
    }
    let ratio = ExactRational::new(a, b)?;
    Ok(nielsen_sandwich(xs, &ratio, false))
}

fn check_nielsen_xs(xs: &[u64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::invalid("xs must be non-empty"));
    }
    if xs[0] <= 1 || xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "xs must be strictly increasing integers > 1",
        ));
    }
    Ok(())
}

// lower <= ratio < upper, or lower < ratio < upper when `strict_lower`.
fn nielsen_sandwich(xs: &[u64], ratio: &ExactRational, strict_lower: bool) -> bool {
    let (lower, upper) = nielsen_products(xs);
    let lower_ok = if strict_lower {
        lower < *ratio
    } else {
        lower <= *ratio
    };
    lower_ok && *ratio < upper
}

fn nielsen_products(xs: &[u64]) -> (ExactRational, ExactRational) {
    let r = xs.len();
    let upper: ExactRational = xs[..r - 1]
        .iter()
        .map(|&x| ExactRational::one_minus_reciprocal(x).expect("x > 1"))
        .product();
    let lower = &upper * &ExactRational::one_minus_reciprocal(xs[r - 1]).expect("x > 1");
    (lower, upper)
}

/// `(a + 1)^(2^r) - (a + 1)^(2^(r-1))`.
pub fn nielsen_bound(a: u64, r: u32) -> Result<BigNat> {
    nielsen_bound_with_budget(a, r, &Budget::default())
}

pub fn nielsen_bound_with_budget(a: u64, r: u32, budget: &Budget) -> Result<BigNat> {
    if a == 0 || r == 0 {
        return Err(Error::invalid("nielsen_bound needs a >= 1 and r >= 1"));
    }
    check_exponent(r, budget)?;
    let base = BigNat::from(a) + 1u32;
    Ok(base.pow(1u32 << r) - base.pow(1u32 << (r - 1)))
}

fn check_exponent(r: u32, budget: &Budget) -> Result<()> {
    if r > budget.max_exponent_log2 {
        return Err(Error::BudgetExceeded {
            what: "exponent",
            requested: 1u128 << r.min(127),
            limit: 1u128 << budget.max_exponent_log2.min(127),
        });
    }
    Ok(())
}

/// `2^(2^K + K) - 2^(2^(K-1) + K)`: every Deaconescu number with `K`
/// distinct prime factors lies below this.
pub fn deaconescu_upper_bound(k: u32) -> Result<BigNat> {
    deaconescu_upper_bound_with_budget(k, &Budget::default())
}

pub fn deaconescu_upper_bound_with_budget(k: u32, budget: &Budget) -> Result<BigNat> {
    let (high, low) = upper_bound_exponents(k, budget)?;
    Ok((BigNat::one() << high) - (BigNat::one() << low))
}

/// The exponents `(2^K + K, 2^(K-1) + K)` of [`deaconescu_upper_bound`].
pub fn upper_bound_exponents(k: u32, budget: &Budget) -> Result<(u64, u64)> {
    if k == 0 {
        return Err(Error::invalid("upper bound needs K >= 1"));
    }
    check_exponent(k, budget)?;
    Ok(((1u64 << k) + k as u64, (1u64 << (k - 1)) + k as u64))
}

/// The instance of Nielsen's inequality built from odd squarefree `n` with
/// `x_j = p_j - 1`, `a = 1`, `a/b = S2(n) / (phi(n) - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NielsenInstance {
    pub n: u128,
    pub xs: Vec<u64>,
    /// `S2(n) / (phi(n) - 1)`.
    pub target: ExactRational,
    /// `prod_{j<=K} (1 - 1/x_j) = S2(n)/phi(n)`.
    pub lower: ExactRational,
    /// `prod_{j<K} (1 - 1/x_j)`.
    pub upper: ExactRational,
    /// `lower < target < upper`.
    pub sandwich_holds: bool,
    /// `b = (phi(n) - 1) / S2(n)` when it is an integer.
    pub integral_b: Option<u128>,
    /// Lemma hypotheses all met: sandwich plus integral `b`.
    pub lemma_applies: bool,
    /// `prod x_j = prod (p_j - 1)`.
    pub product: u128,
    /// `nielsen_bound(1, K) = 2^(2^K) - 2^(2^(K-1))`.
    pub bound: BigNat,
    pub conclusion_holds: bool,
    /// `n < deaconescu_upper_bound(K)`.
    pub below_upper_bound: bool,
}

impl NielsenInstance {
    /// The sandwich holds, and when the lemma applies so do its conclusion
    /// and the resulting upper bound on `n`.
    pub fn is_consistent(&self) -> bool {
        self.sandwich_holds
            && (!self.lemma_applies || (self.conclusion_holds && self.below_upper_bound))
    }
}

pub fn verify_nielsen_instance(
    f: &Factorization,
    phi_minus1: u128,
    s2: u128,
) -> Result<NielsenInstance> {
    if !f.is_odd() || !is_squarefree(f) || f.factors().len() < 2 {
        return Err(Error::invalid(format!(
            "Nielsen instance needs odd squarefree n with at least two primes, got {}",
            f.value()
        )));
    }
    if s2 == 0 || s2 != schemmel_s2(f) || phi_minus1 + 1 != euler_phi(f) {
        return Err(Error::invalid(
            "phi - 1 and S2 do not match the factorization",
        ));
    }
    let xs: Vec<u64> = f.primes().map(|p| p - 1).collect();
    let k = xs.len() as u32;
    let target = ExactRational::new(s2, phi_minus1)?;
    let (lower, upper) = nielsen_products(&xs);
    let sandwich_holds = lower < target && target < upper;
    let integral_b = divides(s2, phi_minus1).then(|| phi_minus1 / s2);
    let lemma_applies = match integral_b {
        Some(b) => nielsen_precondition(&xs, 1, b)?,
        None => false,
    };
    let product: u128 = xs.iter().map(|&x| x as u128).product();
    let bound = nielsen_bound(1, k)?;
    let conclusion_holds = BigNat::from(product) <= bound;
    let below_upper_bound = BigNat::from(f.value()) < deaconescu_upper_bound(k)?;
    Ok(NielsenInstance {
        n: f.value(),
        xs,
        target,
        lower,
        upper,
        sandwich_holds,
        integral_b,
        lemma_applies,
        product,
        bound,
        conclusion_holds,
        below_upper_bound,
    })
}

/// `S = sum_{j=0..d} a_j M^j (-1)^(d-j)` with `a_0 = 1`, for the monic
/// `P(X) = X^d + a_1 X^(d-1) + ... + a_d`. Equals `M^d P(-1/M)`.
pub fn theorem13_residue(coeffs: &[i64], m: u64) -> Result<BigInt> {
    if coeffs.is_empty() {
        return Err(Error::invalid("polynomial degree must be at least 1"));
    }
    if m < 3 || m % 2 == 0 {
        return Err(Error::invalid(format!("M must be odd and >= 3, got {m}")));
    }
    let d = coeffs.len();
    let m = BigInt::from(m);
    let mut power = BigInt::one();
    let mut sum = BigInt::zero();
    for j in 0..=d {
        let a = if j == 0 { 1 } else { coeffs[j - 1] };
        let term = BigInt::from(a) * &power;
        if (d - j) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &m;
    }
    Ok(sum)
}
