//! Named check suites over the arithmetic, predicate and bounds layers.
//!
//! Each suite returns one [`CheckOutcome`] per check. Random instances come
//! from a fixed-seed generator so repeated runs check the same cases.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{
    count_exceptional, euler_phi, factorize, is_squarefree, omega, schemmel_s2, sieve_primes,
    Factorization, TotientTable,
};
use crate::bounds::{
    deaconescu_upper_bound, mod3_obstruction_check, nielsen_bound, nielsen_precondition,
    omega2_scan, q_product, ratio_phi_over_s2, skip3_product, theorem13_residue,
    verify_nielsen_instance, BigNat, ExactRational,
};
use crate::props::{check_d1_is_primes, structural_filter, ClassificationRecord};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 20_220_622;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Only primes satisfy the equation with `M = 1`.
    Lemma21,
    /// Ratio products, the two-prime elimination and the mod-3 obstruction.
    Thm11,
    /// Nielsen's inequality and the resulting upper bound.
    Nielsen,
    /// `S2(n)` equals the number of exceptional units.
    Oracle,
    /// The residue `S` of the polynomial congruence.
    Thm13,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Lemma21,
        Suite::Thm11,
        Suite::Nielsen,
        Suite::Oracle,
        Suite::Thm13,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma21 => "lemma21",
            Suite::Thm11 => "thm11",
            Suite::Nielsen => "nielsen",
            Suite::Oracle => "oracle",
            Suite::Thm13 => "thm13",
        }
    }

    /// Scale used when no `--limit` is given.
    pub fn default_limit(self) -> u64 {
        match self {
            Suite::Lemma21 => 100_000,
            Suite::Thm11 => 10_000,
            Suite::Nielsen => 1_000,
            Suite::Oracle => 10_000,
            Suite::Thm13 => 500,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Operations of [`crate::bounds`] this check calls.
    #[serde(skip)]
    pub exercises: &'static [&'static str],
}

fn outcome(
    suite: Suite,
    check: &'static str,
    exercises: &'static [&'static str],
    failure: Option<String>,
    success: String,
) -> CheckOutcome {
    CheckOutcome {
        suite,
        check,
        passed: failure.is_none(),
        detail: failure.unwrap_or(success),
        exercises,
    }
}

/// Runs `suite` at scale `limit` (its meaning depends on the suite).
pub fn run_suite(suite: Suite, limit: Option<u64>, seed: u64) -> Result<Vec<CheckOutcome>> {
    let limit = limit.unwrap_or(suite.default_limit());
    match suite {
        Suite::Lemma21 => lemma21(limit),
        Suite::Thm11 => thm11(limit),
        Suite::Nielsen => nielsen(limit, seed),
        Suite::Oracle => oracle(limit),
        Suite::Thm13 => thm13(limit, seed),
    }
}

fn oracle(limit: u64) -> Result<Vec<CheckOutcome>> {
    let mut failure = None;
    for n in 1..=limit {
        let brute = count_exceptional(n)? as u128;
        let formula = schemmel_s2(&factorize(n)?);
        if brute != formula {
            failure = Some(format!("n = {n}: |units| = {brute}, S2 = {formula}"));
            break;
        }
    }
    Ok(vec![outcome(
        Suite::Oracle,
        "s2_counts_exceptional_units",
        &[],
        failure,
        format!("S2(n) = |Z_n^**| for all 1 <= n <= {limit}"),
    )])
}

fn lemma21(limit: u64) -> Result<Vec<CheckOutcome>> {
    let report = check_d1_is_primes(limit.max(2))?;
    Ok(vec![
        outcome(
            Suite::Lemma21,
            "no_composite_with_unit_multiplier",
            &[],
            report
                .composite_violations
                .first()
                .map(|n| format!("composite {n} has M = 1")),
            format!("no composite n <= {} has M = 1", report.limit),
        ),
        outcome(
            Suite::Lemma21,
            "every_prime_has_unit_multiplier",
            &[],
            report
                .prime_violations
                .first()
                .map(|p| format!("prime {p} fails M = 1")),
            format!(
                "all {} primes <= {} have M = 1",
                report.primes_checked, report.limit
            ),
        ),
    ])
}

fn thm11(limit: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let five = ExactRational::from_integer(5);
    let three = ExactRational::from_integer(3);

    let q6 = q_product(6)?;
    let expected = ExactRational::new(2048, 495)?;
    let mut failure = (q6 != expected).then(|| format!("Q_6 = {q6}, expected {expected}"));
    for r in 3..=6 {
        let q = q_product(r)?;
        if failure.is_none() && q >= five {
            failure = Some(format!("Q_{r} = {q} is not below 5"));
        }
    }
    out.push(outcome(
        Suite::Thm11,
        "q_products_below_five",
        &["q_product"],
        failure,
        format!("Q_6 = {q6} and Q_r < 5 for 3 <= r <= 6"),
    ));

    let s6 = skip3_product(6)?;
    let expected = ExactRational::new(2048, 935)?;
    let failure = if s6 != expected {
        Some(format!("product = {s6}, expected {expected}"))
    } else if s6 >= three {
        Some(format!("{s6} is not below 3"))
    } else {
        None
    };
    out.push(outcome(
        Suite::Thm11,
        "skip3_product_below_three",
        &["skip3_product"],
        failure,
        format!("prod over 5..19 of (q-1)/(q-2) = {s6} < 3"),
    ));

    let prime_limit = limit.max(5);
    let solutions = omega2_scan(prime_limit)?;
    out.push(outcome(
        Suite::Thm11,
        "omega2_has_no_odd_multiplier",
        &["omega2_scan"],
        solutions
            .first()
            .map(|s| format!("{} * {} gives M = {}", s.p1, s.p2, s.m)),
        format!("no odd prime pair <= {prime_limit} solves the two-prime equation"),
    ));

    let pool: Vec<u64> = sieve_primes(100)?.into_iter().filter(|&p| p >= 5).collect();
    let mut tuples = 0u64;
    let mut failure = None;
    for_each_subset(&pool, 6, &mut |subset| {
        tuples += 1;
        match mod3_obstruction_check(subset) {
            Ok(true) => true,
            Ok(false) => {
                failure = Some(format!("{subset:?} escapes the obstruction"));
                false
            }
            Err(e) => {
                failure = Some(e.to_string());
                false
            }
        }
    });
    out.push(outcome(
        Suite::Thm11,
        "mod3_obstruction",
        &["mod3_obstruction_check"],
        failure,
        format!("{tuples} tuples of distinct primes in [5, 100] of length <= 6"),
    ));

    // phi/S2 of any odd squarefree n is at most Q_omega, and below the
    // skip-3 product when 3 does not divide n.
    let table_limit = limit.max(1000);
    let mut failure = None;
    let mut checked = 0u64;
    let q: Vec<ExactRational> = (1..=8).map(q_product).collect::<Result<_>>()?;
    let s: Vec<ExactRational> = (1..=8).map(skip3_product).collect::<Result<_>>()?;
    for n in (3..=table_limit).step_by(2) {
        let f = factorize(n)?;
        if !is_squarefree(&f) {
            continue;
        }
        let r = omega(&f);
        let ratio = ratio_phi_over_s2(&f)?;
        let cap = if n % 3 == 0 { &q[r - 1] } else { &s[r - 1] };
        checked += 1;
        if ratio > *cap {
            failure = Some(format!("phi/S2({n}) = {ratio} exceeds {cap}"));
            break;
        }
    }
    out.push(outcome(
        Suite::Thm11,
        "ratio_bounded_by_q_products",
        &["ratio_phi_over_s2", "q_product", "skip3_product"],
        failure,
        format!("{checked} odd squarefree n <= {table_limit}"),
    ));

    // Values failing the odd/squarefree conditions never carry a multiplier
    // unless prime.
    let table = TotientTable::build(table_limit)?;
    let mut failure = None;
    for n in 2..=table_limit {
        let record = ClassificationRecord::from_values(
            n as u128,
            table.phi(n) as u128,
            table.s2(n) as u128,
            table.is_prime(n),
        );
        let verdict = structural_filter(&factorize(n)?);
        if !verdict.passes_all && record.multiplier.is_some() && !record.is_prime {
            failure = Some(format!(
                "{n} fails the filter but has M = {:?}",
                record.multiplier
            ));
            break;
        }
    }
    out.push(outcome(
        Suite::Thm11,
        "filter_contrapositive",
        &[],
        failure,
        format!("every composite n <= {table_limit} failing the filter has no multiplier"),
    ));
    Ok(out)
}

/// Visits every non-empty subset of `pool` of size `<= max_len` in
/// lexicographic order; stops when `visit` returns false.
fn for_each_subset(pool: &[u64], max_len: usize, visit: &mut dyn FnMut(&[u64]) -> bool) {
    fn go(
        pool: &[u64],
        start: usize,
        max_len: usize,
        current: &mut Vec<u64>,
        visit: &mut dyn FnMut(&[u64]) -> bool,
    ) -> bool {
        for i in start..pool.len() {
            current.push(pool[i]);
            let keep_going = visit(current)
                && (current.len() == max_len || go(pool, i + 1, max_len, current, visit));
            current.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    go(pool, 0, max_len, &mut Vec::new(), visit);
}

/// Draws `(xs, a, b)` satisfying Nielsen's hypothesis: `xs` strictly
/// increasing in `[2, max_x]` of length `<= max_r`, `1 <= a <= max_a`.
pub fn random_nielsen_hypothesis(
    rng: &mut impl Rng,
    max_x: u64,
    max_r: usize,
    max_a: u64,
) -> (Vec<u64>, u64, u64) {
    loop {
        let r = rng.gen_range(1..=max_r);
        let mut xs: Vec<u64> = (2..=max_x).collect::<Vec<_>>();
        xs.shuffle(rng);
        xs.truncate(r);
        xs.sort_unstable();
        let a = rng.gen_range(1..=max_a);
        // lower <= a/b < upper  <=>  a/upper < b <= a/lower
        let upper: ExactRational = xs[..r - 1]
            .iter()
            .map(|&x| ExactRational::one_minus_reciprocal(x).expect("x > 1"))
            .product();
        let lower = &upper * &ExactRational::one_minus_reciprocal(xs[r - 1]).expect("x > 1");
        let a_big = BigInt::from(a);
        let b_min: BigInt = (&a_big * upper.denom()) / upper.numer() + 1;
        let b_max: BigInt = (&a_big * lower.denom()) / lower.numer();
        if b_min <= b_max {
            let lo: u64 = b_min.try_into().expect("small");
            let hi: u64 = b_max.try_into().expect("small");
            return (xs, a, rng.gen_range(lo..=hi));
        }
    }
}

/// Random odd squarefree `n` with `omega` in `omega_range`, from odd primes
/// `<= prime_limit`.
pub fn random_odd_squarefree(
    rng: &mut impl Rng,
    odd_primes: &[u64],
    omega_range: (usize, usize),
) -> Factorization {
    let k = rng.gen_range(omega_range.0..=omega_range.1);
    let mut chosen: Vec<u64> = odd_primes.choose_multiple(rng, k).copied().collect();
    chosen.sort_unstable();
    Factorization::from_primes(&chosen).expect("distinct primes below 2^64 with small product")
}

fn nielsen(count: u64, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut failure = None;
    for _ in 0..count {
        let (xs, a, b) = random_nielsen_hypothesis(&mut rng, 50, 6, 5);
        if !nielsen_precondition(&xs, a as u128, b as u128)? {
            failure = Some(format!(
                "generator produced xs={xs:?} a={a} b={b} outside the hypothesis"
            ));
            break;
        }
        let lhs = BigNat::from(a) * xs.iter().map(|&x| BigNat::from(x)).product::<BigNat>();
        let bound = nielsen_bound(a, xs.len() as u32)?;
        if lhs > bound {
            failure = Some(format!("xs={xs:?} a={a} b={b}: {lhs} > {bound}"));
            break;
        }
    }
    out.push(outcome(
        Suite::Nielsen,
        "lemma_conclusion_on_random_hypotheses",
        &["nielsen_precondition", "nielsen_bound"],
        failure,
        format!("{count} random (xs, a, b) with r <= 6, x <= 50, a <= 5"),
    ));

    let odd_primes: Vec<u64> = sieve_primes(1000)?.into_iter().skip(1).collect();
    let instances = (count / 10).max(100);
    let mut failure = None;
    for _ in 0..instances {
        let f = random_odd_squarefree(&mut rng, &odd_primes, (2, 7));
        let (phi, s2) = (euler_phi(&f), schemmel_s2(&f));
        let inst = verify_nielsen_instance(&f, phi - 1, s2)?;
        if !inst.is_consistent() {
            failure = Some(format!("n = {} gives an inconsistent instance", f.value()));
            break;
        }
    }
    out.push(outcome(
        Suite::Nielsen,
        "sandwich_on_random_odd_squarefree",
        &[
            "verify_nielsen_instance",
            "nielsen_precondition",
            "nielsen_bound",
            "deaconescu_upper_bound",
        ],
        failure,
        format!("{instances} random odd squarefree n, 2 <= omega <= 7, primes <= 1000"),
    ));

    let ub7 = deaconescu_upper_bound(7)?;
    let expected = (BigNat::from(1u32) << 135u32) - (BigNat::from(1u32) << 71u32);
    let mut failure = (ub7 != expected).then(|| format!("bound(7) = {ub7}"));
    // n < 2^K prod (p - 1) <= 2^K * nielsen_bound(1, K)
    for k in 1..=12u32 {
        let lhs = deaconescu_upper_bound(k)?;
        let rhs = nielsen_bound(1, k)? << k;
        if failure.is_none() && lhs != rhs {
            failure = Some(format!("K = {k}: {lhs} != 2^K * {rhs}"));
        }
    }
    out.push(outcome(
        Suite::Nielsen,
        "upper_bound_closed_form",
        &["deaconescu_upper_bound", "nielsen_bound"],
        failure,
        "bound(7) = 2^135 - 2^71 and bound(K) = 2^K (2^(2^K) - 2^(2^(K-1))) for K <= 12".into(),
    ));
    Ok(out)
}

/// `M^d P(-1/M)` evaluated as a rational number.
pub fn scaled_value_at_minus_reciprocal(coeffs: &[i64], m: u64) -> ExactRational {
    let x = ExactRational::new(-1, m).expect("m > 0");
    // Horner on the monic polynomial.
    let mut value = ExactRational::one();
    for &a in coeffs {
        value = value * x.clone() + ExactRational::from_integer(a);
    }
    let scale = ExactRational::from_integer(BigInt::from(m).pow(coeffs.len() as u32));
    value * scale
}

fn thm13(count: u64, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x13);
    let mut failure = None;
    let mut zero = None;
    for _ in 0..count {
        let d = rng.gen_range(1..=6);
        let coeffs: Vec<i64> = (0..d).map(|_| rng.gen_range(-10..=10)).collect();
        let m = 2 * rng.gen_range(1..=49) + 1;
        let s = theorem13_residue(&coeffs, m)?;
        let rational = scaled_value_at_minus_reciprocal(&coeffs, m);
        if rational != ExactRational::from_integer(s.clone()) {
            failure = Some(format!(
                "P = {coeffs:?}, M = {m}: S = {s}, M^d P(-1/M) = {rational}"
            ));
            break;
        }
        if s == BigInt::from(0) {
            zero = Some(format!("P = {coeffs:?} vanishes at -1/{m}"));
        }
    }
    Ok(vec![
        outcome(
            Suite::Thm13,
            "residue_matches_scaled_evaluation",
            &["theorem13_residue"],
            failure,
            format!("{count} random monic P with d <= 6, |a_j| <= 10, odd 3 <= M <= 99"),
        ),
        outcome(
            Suite::Thm13,
            "residue_never_zero",
            &["theorem13_residue"],
            zero,
            "S != 0: -1/M is never a root of a monic integer polynomial".into(),
        ),
    ])
}
